//! The sphere `S^{2^r m}` and its two stereographic charts.
//!
//! A sphere point `y in R^{2^r m + 1}` is stored in `A_r^{m+1}`: the first
//! `m` coordinates carry `y'`, the real part of the last carries `y_last`.
//! The north chart (pole `+1`) is `u = y' / (1 - y_last)`; the south chart
//! (pole `-1`) is `u = conj(y') / (1 + y_last)`, conjugated coordinatewise,
//! so that both transitions read `u -> u* / |u|^2`.

use crate::algebra::CdElement;
use crate::error::{Error, Result};
use crate::holomorphy::{Phrase, PhraseMap};
use crate::linear::CdVector;

const SPHERE_TOL: f64 = 1e-12;

/// Projection pole of a stereographic chart.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pole {
    North,
    South,
}

impl Pole {
    pub fn sign(self) -> f64 {
        match self {
            Pole::North => 1.0,
            Pole::South => -1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Pole::North => "north",
            Pole::South => "south",
        }
    }
}

/// The pole `(0, .., 0, sign)` in `R^{dim + 1}`.
pub fn pole_point(pole: Pole, dim: usize) -> Vec<f64> {
    let mut y = vec![0.0; dim + 1];
    y[dim] = pole.sign();
    y
}

fn conj_coords(u: &CdVector<f64>) -> CdVector<f64> {
    CdVector::new(u.components().iter().map(CdElement::conj).collect()).expect("nonempty")
}

/// Chart coordinates of a sphere point `y in R^{2^r m + 1}`.
pub fn stereographic_forward(pole: Pole, level: u32, y: &[f64]) -> Result<CdVector<f64>> {
    let dim = 1usize << level;
    if y.len() < 2 || !(y.len() - 1).is_multiple_of(dim) {
        return Err(Error::ShapeMismatch(format!("sphere point of length {} at level {level}", y.len())));
    }
    let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > SPHERE_TOL {
        return Err(Error::OutsideDomain(format!("|y| = {norm} is not 1")));
    }
    let last = y[y.len() - 1];
    let denom = 1.0 - pole.sign() * last;
    if denom <= SPHERE_TOL {
        return Err(Error::OutsideDomain(format!("y is the {} pole", pole.name())));
    }
    let head = CdVector::from_real(level, &y[..y.len() - 1])?.scale(1.0 / denom);
    Ok(match pole {
        Pole::North => head,
        Pole::South => conj_coords(&head),
    })
}

/// Inverse of [`stereographic_forward`].
pub fn stereographic_backward(pole: Pole, u: &CdVector<f64>) -> Vec<f64> {
    let s = u.norm_sqr();
    let head = match pole {
        Pole::North => u.clone(),
        Pole::South => conj_coords(u),
    };
    let mut y: Vec<f64> = head.to_real().iter().map(|v| 2.0 * v / (1.0 + s)).collect();
    y.push(pole.sign() * (s - 1.0) / (s + 1.0));
    y
}

/// `u -> u* / |u|^2`, the change of chart in either direction.
pub fn sphere_transition(u: &CdVector<f64>) -> Result<CdVector<f64>> {
    let s = u.norm_sqr();
    if s == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(conj_coords(u).scale(1.0 / s))
}

/// `sum_j z_j* z_j` over `vars`, as a phrase.
fn norm_sqr(vars: std::ops::Range<usize>) -> Phrase<f64> {
    Phrase::norm_sqr_of(vars).expect("at least one variable")
}

/// `u -> u* / |u|^2` on `A_r^m` as `Mul(Conj(z_k), Inv(sum_j Conj(z_j) z_j))`.
pub fn transition_phrase(level: u32, m: usize) -> PhraseMap<f64> {
    let inv = Phrase::inv(norm_sqr(0..m));
    let comps = (0..m).map(|k| Phrase::mul(Phrase::conj(Phrase::var(k)), inv.clone())).collect();
    PhraseMap::new(m, level, comps).expect("well-formed")
}

/// Chart map from `A_r^{m+1}` (sphere points) to `A_r^m`.
pub fn forward_phrase(pole: Pole, level: u32, m: usize) -> PhraseMap<f64> {
    let one = Phrase::real(level, 1.0);
    let last = Phrase::var(m);
    let denom = Phrase::inv(match pole {
        Pole::North => Phrase::sub(one, last),
        Pole::South => Phrase::add(one, last),
    });
    let comps = (0..m)
        .map(|k| {
            let head = match pole {
                Pole::North => Phrase::var(k),
                Pole::South => Phrase::conj(Phrase::var(k)),
            };
            Phrase::mul(head, denom.clone())
        })
        .collect();
    PhraseMap::new(m + 1, level, comps).expect("well-formed")
}

/// Inverse chart map from `A_r^m` to `A_r^{m+1}`.
pub fn inverse_phrase(pole: Pole, level: u32, m: usize) -> PhraseMap<f64> {
    let s = norm_sqr(0..m);
    let one = Phrase::real(level, 1.0);
    let inv = Phrase::inv(Phrase::add(s.clone(), one.clone()));
    let mut comps: Vec<Phrase<f64>> = (0..m)
        .map(|k| {
            let head = match pole {
                Pole::North => Phrase::var(k),
                Pole::South => Phrase::conj(Phrase::var(k)),
            };
            Phrase::mul(Phrase::mul(Phrase::real(level, 2.0), head), inv.clone())
        })
        .collect();
    let num = match pole {
        Pole::North => Phrase::sub(s, one),
        Pole::South => Phrase::sub(one, s),
    };
    comps.push(Phrase::mul(num, inv));
    PhraseMap::new(m, level, comps).expect("well-formed")
}

/// Real shadow of a sphere point stored in `A_r^{m+1}`, truncated to
/// `R^{2^r m + 1}`.
pub fn sphere_coordinates(x: &CdVector<f64>) -> Vec<f64> {
    let dim = 1usize << x.level();
    let mut y = x.to_real();
    y.truncate((x.len() - 1) * dim + 1);
    y
}

/// Store `y in R^{2^r m + 1}` in `A_r^{m+1}`.
pub fn sphere_point(level: u32, y: &[f64]) -> Result<CdVector<f64>> {
    let dim = 1usize << level;
    if y.is_empty() || !(y.len() - 1).is_multiple_of(dim) {
        return Err(Error::ShapeMismatch(format!("sphere point of length {} at level {level}", y.len())));
    }
    let mut real = y.to_vec();
    real.resize(y.len() - 1 + dim, 0.0);
    CdVector::from_real(level, &real)
}
