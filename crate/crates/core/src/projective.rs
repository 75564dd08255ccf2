//! Cayley-Dickson projective machinery: lines, Hermitian hyperplanes and the
//! projection `pi_l : A_r^N -> A_r^{N-1}`.
//!
//! The line through `x != 0` is the right span `{x c : c in A_r}`, whose real
//! shadow is spanned by the `2^r` vectors `x i_p`. Right spans pair with the
//! Hermitian product `<x, y> = sum_j x_j* y_j`: the `i_p` coefficient of
//! `<x, y>` is the real inner product of `x i_p` with `y`, so `y` is
//! Hermitian-orthogonal to `x` exactly when it is real-orthogonal to the
//! line of `x`.

use nalgebra::DMatrix;

use crate::algebra::CdElement;
use crate::error::{Error, Result};
use crate::linalg::{self, extend_orthonormal, largest_principal_angle, orthogonalize_against};
use crate::linear::{check_module_homomorphism, CdVector, HomomorphismReport};
use crate::sampling::{random_unit, rng_for};

/// Relative residual below which a Gram-Schmidt pivot counts as parallel.
const PIVOT_TOL: f64 = 1e-6;

/// A point of the projective space `A_r P^{N-1}`.
#[derive(Clone, Debug)]
pub struct Direction {
    representative: CdVector<f64>,
    line_basis: Vec<Vec<f64>>,
    alphas: Vec<f64>,
}

impl Direction {
    /// The projective map: `x -> x / |x|` together with its line and the
    /// weights `alpha_j = |x_j| / |x|` of the real parts `x_j`.
    pub fn from_vector(x: &CdVector<f64>) -> Result<Self> {
        let norm = x.norm();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        let representative = x.scale(1.0 / norm);
        let alphas = x
            .decompose()
            .real_parts
            .iter()
            .map(|part| linalg::norm(part) / norm)
            .collect();
        let line_basis = line_span(&representative)?;
        Ok(Self { representative, line_basis, alphas })
    }

    /// Direction of a real-shadow vector.
    pub fn from_real(level: u32, v: &[f64]) -> Result<Self> {
        Self::from_vector(&CdVector::from_real(level, v)?)
    }

    pub fn representative(&self) -> &CdVector<f64> {
        &self.representative
    }

    /// Real orthonormal basis of the line's real shadow.
    pub fn line_basis(&self) -> &[Vec<f64>] {
        &self.line_basis
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn level(&self) -> u32 {
        self.representative.level()
    }

    /// `N`, the number of coordinates.
    pub fn len(&self) -> usize {
        self.representative.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest principal angle to another line, in `[0, pi/2]`.
    pub fn distance(&self, other: &Self) -> f64 {
        direction_distance(self, other)
    }
}

/// `projective_phi` under its descriptive name.
pub fn projective_phi(x: &CdVector<f64>) -> Result<Direction> {
    Direction::from_vector(x)
}

/// The right multiples `x i_p`, `p = 0..2^r`, as real vectors.
pub fn line_generators(x: &CdVector<f64>) -> Vec<Vec<f64>> {
    let level = x.level();
    (0..1usize << level)
        .map(|p| x.right_mul(&CdElement::generator(level, p)).expect("same level").to_real())
        .collect()
}

/// Orthonormal basis of the real shadow of the line through `x`.
pub fn line_span(x: &CdVector<f64>) -> Result<Vec<Vec<f64>>> {
    if x.is_zero() {
        return Err(Error::ZeroVector);
    }
    linalg::orthonormalize(&line_generators(x), 1e-9)
        .map_err(|e| Error::Degenerate(format!("line span of {x:?}: {e}")))
}

/// Largest principal angle between two lines.
pub fn direction_distance(a: &Direction, b: &Direction) -> f64 {
    largest_principal_angle(&a.line_basis, &b.line_basis)
}

/// The hyperplane Hermitian-orthogonal to a line, with a Hermitian
/// orthonormal basis `q_1, .., q_{N-1}` completed by `q_N = [l]`.
#[derive(Clone, Debug)]
pub struct Hyperplane {
    direction: Direction,
    basis: Vec<CdVector<f64>>,
    complement: Vec<Vec<f64>>,
    matrix: DMatrix<f64>,
}

impl Hyperplane {
    pub fn direction(&self) -> &Direction {
        &self.direction
    }

    pub fn basis(&self) -> &[CdVector<f64>] {
        &self.basis
    }

    /// Real orthonormal basis of the orthogonal complement of the line.
    pub fn complement(&self) -> &[Vec<f64>] {
        &self.complement
    }

    /// `pi_l` as a real `2^r (N-1) x 2^r N` matrix.
    pub fn real_matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `pi_l(x)`: remove the line component, then read coordinates
    /// `<q_a, x>` in the hyperplane basis.
    pub fn project(&self, x: &CdVector<f64>) -> Result<CdVector<f64>> {
        let l = &self.direction;
        if x.level() != l.level() || x.len() != l.len() {
            return Err(Error::ShapeMismatch(format!(
                "cannot project A_{}^{} along a line in A_{}^{}",
                x.level(),
                x.len(),
                l.level(),
                l.len()
            )));
        }
        let stripped = remove_line(&x.to_real(), &l.line_basis);
        let stripped = CdVector::from_real(x.level(), &stripped)?;
        let comps = self.basis.iter().map(|q| q.hermitian(&stripped)).collect::<Result<_>>()?;
        CdVector::new(comps)
    }

    /// Apply the cached real matrix to a real-shadow vector.
    pub fn project_real(&self, x: &[f64]) -> Vec<f64> {
        (&self.matrix * nalgebra::DVector::from_column_slice(x)).iter().copied().collect()
    }

    /// Sampled left/right `A_r`-linearity residuals of `pi_l`.
    pub fn linearity(&self, samples: usize, seed: u64) -> Result<HomomorphismReport> {
        check_module_homomorphism(|x| self.project(x), self.direction.level(), self.direction.len(), samples, seed)
    }

    /// `sum_a q_a y_a`.
    pub fn lift(&self, y: &CdVector<f64>) -> Result<CdVector<f64>> {
        if y.len() != self.basis.len() {
            return Err(Error::ShapeMismatch(format!("lift takes {} coordinates", self.basis.len())));
        }
        let mut acc = CdVector::zeros(y.level(), self.direction.len());
        for (q, c) in self.basis.iter().zip(y.components()) {
            acc = acc.try_add(&q.right_mul(c)?)?;
        }
        Ok(acc)
    }
}

fn remove_line(x: &[f64], line: &[Vec<f64>]) -> Vec<f64> {
    let mut w = x.to_vec();
    for b in line {
        let c = linalg::dot(b, &w);
        for (wi, bi) in w.iter_mut().zip(b) {
            *wi -= c * bi;
        }
    }
    w
}

/// Build the hyperplane of `l` by two-pass Gram-Schmidt on the real shadow.
///
/// Seeds are the coordinate vectors `e_1, .., e_N` in order; a seed whose
/// residual against the span built so far is below `1e-6` of its norm is
/// skipped. Each accepted `q` contributes its whole line to the span. If the
/// coordinate seeds run out, seeded random vectors are tried before failing.
pub fn hyperplane_of(l: &Direction) -> Result<Hyperplane> {
    let level = l.level();
    let n = l.len();
    let dim = 1usize << level;
    let mut span: Vec<Vec<f64>> = l.line_basis.clone();
    let mut basis: Vec<CdVector<f64>> = Vec::with_capacity(n.saturating_sub(1));

    let coordinate_seeds = (0..n).map(|k| CdVector::<f64>::basis(level, n, k).to_real());
    let mut rng = rng_for(0x6879_7065, &[level as u64, n as u64]);
    let random_seeds = std::iter::repeat_with(move || random_unit(dim * n, &mut rng)).take(8 * n);

    for seed in coordinate_seeds.chain(random_seeds) {
        if basis.len() + 1 >= n {
            break;
        }
        let w = orthogonalize_against(&seed, &span);
        let wn = linalg::norm(&w);
        if wn <= PIVOT_TOL * linalg::norm(&seed) {
            continue;
        }
        let q = CdVector::from_real(level, &w.iter().map(|x| x / wn).collect::<Vec<_>>())?;
        extend_orthonormal(&mut span, &line_generators(&q), PIVOT_TOL);
        basis.push(q);
    }
    if basis.len() + 1 != n.max(1) {
        return Err(Error::Degenerate(format!(
            "hyperplane construction found {} of {} basis vectors",
            basis.len(),
            n - 1
        )));
    }
    let complement = span[dim..].to_vec();

    let mut hyperplane = Hyperplane {
        direction: l.clone(),
        basis,
        complement,
        matrix: DMatrix::zeros((n - 1) * dim, n * dim),
    };
    let mut e = vec![0.0; n * dim];
    for col in 0..n * dim {
        e[col] = 1.0;
        let y = hyperplane.project(&CdVector::from_real(level, &e)?)?.to_real();
        e[col] = 0.0;
        hyperplane.matrix.set_column(col, &nalgebra::DVector::from_vec(y));
    }
    Ok(hyperplane)
}

/// `pi_l(x)` for a freshly built hyperplane.
pub fn project_pi_l(x: &CdVector<f64>, l: &Direction) -> Result<CdVector<f64>> {
    hyperplane_of(l)?.project(x)
}
