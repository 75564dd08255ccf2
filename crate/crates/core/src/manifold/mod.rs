//! `A_r`-holomorphic manifolds given by finite chart atlases.
//!
//! Points of a manifold live in a model space `A_r^model_dim`. A chart
//! carries phrase maps `phi_j : A_r^model_dim -> A_r^m` and its inverse,
//! and a radius `R_j`; its domain `U_j` is where `|phi_j(x)| < R_j`, with
//! the membership margin
//!
//! ```text
//! indicator_j(x) = 1 - smoothstep(|phi_j(x)|^2 / R_j^2),  smoothstep(t) = 6t^5 - 15t^4 + 10t^3
//! ```
//!
//! A point is deep in a chart when its indicator exceeds one half.

pub mod config;
pub mod sampler;
pub mod sphere;
mod validate;

use std::sync::OnceLock;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::holomorphy::{derivative_jacobian, Phrase, PhraseMap};
use crate::linalg::singular_values;
use crate::linear::CdVector;
use crate::sampling::{derive_seed, random_unit};
pub use config::{glued_balls_toml, ChartConfig, ManifoldConfig, TransitionConfig};
pub use sampler::Halton;
pub use sphere::Pole;
pub use validate::{AtlasCheck, AtlasReport, Bound, COCYCLE_TOL, FRAME_TOL, HOLOMORPHY_TOL, ROUND_TRIP_TOL};

/// Indicator above which a point counts as deep inside a chart.
pub const DEEP: f64 = 0.5;
pub const SPHERE_RADIUS: f64 = 4.0;
const LANDMARKS_PER_CHART: usize = 32;
const LANDMARK_TAG: u64 = 0x6c61_6e64;

pub const BUILTINS: [&str; 3] = ["sphere", "sphere-product", "glued-balls"];

pub fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * t * (10.0 + t * (-15.0 + 6.0 * t))
}

#[derive(Clone, Debug)]
pub struct Chart {
    id: String,
    radius: f64,
    forward: PhraseMap<f64>,
    inverse: PhraseMap<f64>,
    inverse_derivative: PhraseMap<f64>,
}

impl Chart {
    pub fn new(id: &str, radius: f64, forward: PhraseMap<f64>, inverse: PhraseMap<f64>) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::Config(format!("chart {id}: radius must be positive, got {radius}")));
        }
        if forward.level() != inverse.level()
            || forward.output_dim() != inverse.input_dim()
            || inverse.output_dim() != forward.input_dim()
        {
            return Err(Error::ShapeMismatch(format!(
                "chart {id}: forward A_r^{} -> A_r^{} does not invert A_r^{} -> A_r^{}",
                forward.input_dim(),
                forward.output_dim(),
                inverse.input_dim(),
                inverse.output_dim()
            )));
        }
        let inverse_derivative = inverse.derivative();
        Ok(Self { id: id.into(), radius, forward, inverse, inverse_derivative })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn forward_map(&self) -> &PhraseMap<f64> {
        &self.forward
    }

    pub fn inverse_map(&self) -> &PhraseMap<f64> {
        &self.inverse
    }

    /// `phi_j(x)` if it evaluates to finite coordinates inside the radius.
    pub fn coordinates(&self, x: &CdVector<f64>) -> Option<CdVector<f64>> {
        let u = self.forward.eval(x).ok()?;
        (u.norm_sqr() < self.radius * self.radius).then_some(u)
    }

    pub fn indicator_at(&self, u: &CdVector<f64>) -> f64 {
        let t = u.norm_sqr() / (self.radius * self.radius);
        if t.is_finite() && t < 1.0 {
            1.0 - smoothstep(t)
        } else {
            0.0
        }
    }

    pub fn indicator(&self, x: &CdVector<f64>) -> f64 {
        self.coordinates(x).map_or(0.0, |u| self.indicator_at(&u))
    }

    pub fn inverse(&self, u: &CdVector<f64>) -> Result<CdVector<f64>> {
        self.inverse.eval(u)
    }

    /// `d phi_j^{-1}` at `u`, a real `2^r model_dim x 2^r m` matrix.
    pub fn inverse_jacobian(&self, u: &CdVector<f64>) -> Result<DMatrix<f64>> {
        derivative_jacobian(&self.inverse_derivative, u)
    }
}

/// A declared change of coordinates `phi_to . phi_from^{-1}`.
#[derive(Clone, Debug)]
pub struct Transition {
    pub from: usize,
    pub to: usize,
    pub map: PhraseMap<f64>,
}

/// `T(phi_to . phi_from^{-1}) = (base, D base)` on `U x A_r^m`.
#[derive(Clone, Debug)]
pub struct TangentBundleChart {
    pub from: usize,
    pub to: usize,
    pub base: PhraseMap<f64>,
    /// Derivative of `base` over the doubled variables `(u, h)`.
    pub fibre: PhraseMap<f64>,
}

impl TangentBundleChart {
    pub fn apply(&self, u: &CdVector<f64>, h: &CdVector<f64>) -> Result<(CdVector<f64>, CdVector<f64>)> {
        Ok((self.base.eval(u)?, self.fibre.eval(&crate::holomorphy::doubled(u, h)?)?))
    }
}

/// Tangent vectors at a point, as columns in model real coordinates.
#[derive(Clone, Debug)]
pub struct TangentFrame {
    pub point: CdVector<f64>,
    pub chart: usize,
    pub coords: CdVector<f64>,
    pub vectors: DMatrix<f64>,
}

impl TangentFrame {
    pub fn min_singular_value(&self) -> f64 {
        singular_values(&self.vectors).last().copied().unwrap_or(0.0)
    }
}

struct Landmarks {
    coords: Vec<Vec<Option<CdVector<f64>>>>,
    /// Shortest chart-path distances, row-major.
    dist: Vec<f64>,
}

#[derive(Debug)]
pub struct Manifold {
    name: String,
    level: u32,
    dim: usize,
    model_dim: usize,
    charts: Vec<Chart>,
    transitions: Vec<Transition>,
    seed: u64,
    landmarks: OnceLock<Landmarks>,
}

impl std::fmt::Debug for Landmarks {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Landmarks({})", self.coords.len())
    }
}

impl Clone for Manifold {
    fn clone(&self) -> Self {
        Self {
            name: self.name.clone(),
            level: self.level,
            dim: self.dim,
            model_dim: self.model_dim,
            charts: self.charts.clone(),
            transitions: self.transitions.clone(),
            seed: self.seed,
            landmarks: OnceLock::new(),
        }
    }
}

fn min_distance(a: &[Option<CdVector<f64>>], b: &[Option<CdVector<f64>>]) -> Option<f64> {
    a.iter()
        .zip(b)
        .filter_map(|(x, y)| Some(x.as_ref()?.distance(y.as_ref()?)))
        .min_by(f64::total_cmp)
}

impl Manifold {
    pub fn new(
        name: impl Into<String>,
        level: u32,
        dim: usize,
        model_dim: usize,
        charts: Vec<Chart>,
        transitions: Vec<Transition>,
        seed: u64,
    ) -> Result<Self> {
        crate::algebra::check_level(level)?;
        if charts.is_empty() {
            return Err(Error::Config("an atlas needs at least one chart".into()));
        }
        for c in &charts {
            if c.forward.level() != level || c.forward.input_dim() != model_dim || c.forward.output_dim() != dim {
                return Err(Error::ShapeMismatch(format!(
                    "chart {} maps A_{}^{} -> A_r^{}, atlas expects A_{level}^{model_dim} -> A_r^{dim}",
                    c.id,
                    c.forward.level(),
                    c.forward.input_dim(),
                    c.forward.output_dim()
                )));
            }
        }
        for t in &transitions {
            if t.from >= charts.len() || t.to >= charts.len() {
                return Err(Error::IndexOutOfRange { index: t.from.max(t.to), dim: charts.len() });
            }
            if t.map.input_dim() != dim || t.map.output_dim() != dim || t.map.level() != level {
                return Err(Error::ShapeMismatch(format!("transition {} -> {} is not a map of A_r^{dim}", t.from, t.to)));
            }
        }
        Ok(Self { name: name.into(), level, dim, model_dim, charts, transitions, seed, landmarks: OnceLock::new() })
    }

    pub fn builtin(name: &str, level: u32, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Config("m must be at least 1".into()));
        }
        match name {
            "sphere" => Ok(Self::sphere(level, m)),
            "sphere-product" => Ok(Self::sphere_product(level, m)),
            "glued-balls" => ManifoldConfig::from_toml(&glued_balls_toml(level, m))?.build(None, None),
            other => Err(Error::UnknownBuiltin(other.into())),
        }
    }

    /// `S^{2^r m}` with its north and south stereographic charts.
    pub fn sphere(level: u32, m: usize) -> Self {
        let charts = [Pole::North, Pole::South]
            .map(|pole| {
                Chart::new(
                    pole.name(),
                    SPHERE_RADIUS,
                    sphere::forward_phrase(pole, level, m),
                    sphere::inverse_phrase(pole, level, m),
                )
                .expect("consistent shapes")
            })
            .to_vec();
        let t = sphere::transition_phrase(level, m);
        let transitions =
            vec![Transition { from: 0, to: 1, map: t.clone() }, Transition { from: 1, to: 0, map: t }];
        Self::new("sphere", level, m, m + 1, charts, transitions, 0).expect("consistent shapes")
    }

    /// `S^{2^r m} x S^{2^r m}` with the four products of stereographic charts.
    pub fn sphere_product(level: u32, m: usize) -> Self {
        let shift = |p: &Phrase<f64>, by: usize, n: usize| {
            let vars: Vec<Phrase<f64>> = (0..n).map(|k| Phrase::var(k + by)).collect();
            p.substitute(&vars).expect("in range")
        };
        let mut charts = Vec::with_capacity(4);
        for a in [Pole::North, Pole::South] {
            for b in [Pole::North, Pole::South] {
                let (fa, fb) = (sphere::forward_phrase(a, level, m), sphere::forward_phrase(b, level, m));
                let (ia, ib) = (sphere::inverse_phrase(a, level, m), sphere::inverse_phrase(b, level, m));
                let forward = fa
                    .components()
                    .iter()
                    .cloned()
                    .chain(fb.components().iter().map(|p| shift(p, m + 1, m + 1)))
                    .collect();
                let inverse =
                    ia.components().iter().cloned().chain(ib.components().iter().map(|p| shift(p, m, m))).collect();
                charts.push(
                    Chart::new(
                        &format!("{}-{}", a.name(), b.name()),
                        SPHERE_RADIUS,
                        PhraseMap::new(2 * (m + 1), level, forward).expect("in range"),
                        PhraseMap::new(2 * m, level, inverse).expect("in range"),
                    )
                    .expect("consistent shapes"),
                );
            }
        }
        Self::new("sphere-product", level, 2 * m, 2 * (m + 1), charts, Vec::new(), 0).expect("consistent shapes")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// `m`, the `A_r`-dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `2^r m`.
    pub fn real_dim(&self) -> usize {
        self.dim << self.level
    }

    pub fn model_dim(&self) -> usize {
        self.model_dim
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn chart_index(&self, id: &str) -> Option<usize> {
        self.charts.iter().position(|c| c.id == id)
    }

    pub fn indicators(&self, x: &CdVector<f64>) -> Vec<f64> {
        self.charts.iter().map(|c| c.indicator(x)).collect()
    }

    /// The chart of largest indicator (lowest index on ties) with the
    /// coordinates and indicator of `x` there.
    pub fn deepest_chart(&self, x: &CdVector<f64>) -> Option<(usize, CdVector<f64>, f64)> {
        let mut best: Option<(usize, CdVector<f64>, f64)> = None;
        for (j, c) in self.charts.iter().enumerate() {
            if let Some(u) = c.coordinates(x) {
                let t = c.indicator_at(&u);
                if t > 0.0 && best.as_ref().is_none_or(|b| t > b.2) {
                    best = Some((j, u, t));
                }
            }
        }
        best
    }

    /// The deepest chart of `x`, which must clear [`DEEP`].
    pub fn deep_chart(&self, x: &CdVector<f64>) -> Result<(usize, CdVector<f64>)> {
        match self.deepest_chart(x) {
            Some((j, u, t)) if t > DEEP => Ok((j, u)),
            _ => Err(Error::Coverage { point: x.to_real() }),
        }
    }

    /// `count` points, round-robin over the charts; chart `j` contributes
    /// inverse images of a shifted Halton sequence in its deep ball
    /// `|u| < R_j / sqrt 2`.
    pub fn sample_points(&self, count: usize, seed: u64) -> Result<Vec<CdVector<f64>>> {
        let n = self.charts.len();
        let mut seqs: Vec<Halton> =
            (0..n).map(|j| Halton::new(self.real_dim(), derive_seed(seed, &[j as u64]))).collect();
        (0..count)
            .map(|i| {
                let j = i % n;
                let c = &self.charts[j];
                let u = seqs[j].next_in_ball(0.999 * c.radius / std::f64::consts::SQRT_2);
                c.inverse(&CdVector::from_real(self.level, &u)?)
            })
            .collect()
    }

    /// `phi_j^{-1}(phi_j(x) + delta v)` for a random unit `v` in the deepest
    /// chart `j` of `x`.
    pub fn perturb(&self, x: &CdVector<f64>, delta: f64, rng: &mut impl rand::Rng) -> Result<CdVector<f64>> {
        let (j, u) = self.deep_chart(x)?;
        let v: Vec<f64> = random_unit(self.real_dim(), rng).iter().map(|t| t * delta).collect();
        self.charts[j].inverse(&u.try_add(&CdVector::from_real(self.level, &v)?)?)
    }

    fn chart_coords(&self, x: &CdVector<f64>) -> Vec<Option<CdVector<f64>>> {
        self.charts.iter().map(|c| c.coordinates(x).filter(|u| c.indicator_at(u) > 0.0)).collect()
    }

    fn landmarks(&self) -> &Landmarks {
        self.landmarks.get_or_init(|| {
            let count = LANDMARKS_PER_CHART * self.charts.len();
            let points = self.sample_points(count, derive_seed(self.seed, &[LANDMARK_TAG])).unwrap_or_default();
            let coords: Vec<_> = points.iter().map(|p| self.chart_coords(p)).collect();
            let w = coords.len();
            let mut dist = vec![f64::INFINITY; w * w];
            for a in 0..w {
                dist[a * w + a] = 0.0;
                for b in 0..a {
                    if let Some(d) = min_distance(&coords[a], &coords[b]) {
                        dist[a * w + b] = d;
                        dist[b * w + a] = d;
                    }
                }
            }
            for k in 0..w {
                for a in 0..w {
                    let ak = dist[a * w + k];
                    if ak.is_infinite() {
                        continue;
                    }
                    for b in 0..w {
                        let via = ak + dist[k * w + b];
                        if via < dist[a * w + b] {
                            dist[a * w + b] = via;
                        }
                    }
                }
            }
            Landmarks { coords, dist }
        })
    }

    /// Whether the landmark graph (edges between landmarks sharing a chart)
    /// is connected.
    pub fn landmarks_connected(&self) -> bool {
        let l = self.landmarks();
        !l.coords.is_empty() && l.dist.iter().all(|d| d.is_finite())
    }

    /// Chart-path proxy for the intrinsic distance: the smallest chart
    /// coordinate distance over common charts, or else the shortest route
    /// through landmark points.
    pub fn distance(&self, x: &CdVector<f64>, y: &CdVector<f64>) -> f64 {
        let cx = self.chart_coords(x);
        let cy = self.chart_coords(y);
        if let Some(d) = min_distance(&cx, &cy) {
            return d;
        }
        let l = self.landmarks();
        let w = l.coords.len();
        let dx: Vec<f64> = l.coords.iter().map(|c| min_distance(&cx, c).unwrap_or(f64::INFINITY)).collect();
        let dy: Vec<f64> = l.coords.iter().map(|c| min_distance(c, &cy).unwrap_or(f64::INFINITY)).collect();
        let mut best = f64::INFINITY;
        for a in (0..w).filter(|&a| dx[a].is_finite()) {
            for b in (0..w).filter(|&b| dy[b].is_finite()) {
                best = best.min(dx[a] + l.dist[a * w + b] + dy[b]);
            }
        }
        best
    }

    /// Frame of `d phi_j^{-1}` at the deepest chart of `x`.
    pub fn tangent_frame(&self, x: &CdVector<f64>) -> Result<TangentFrame> {
        let (j, u) = self.deep_chart(x)?;
        self.tangent_frame_in(x, j, u)
    }

    /// Frame of `d phi_j^{-1}` at `u = phi_j(x)` for a given chart.
    pub fn tangent_frame_in(&self, x: &CdVector<f64>, j: usize, u: CdVector<f64>) -> Result<TangentFrame> {
        let vectors = self.charts[j].inverse_jacobian(&u)?;
        Ok(TangentFrame { point: x.clone(), chart: j, coords: u, vectors })
    }

    /// `phi_to . phi_from^{-1}` by substituting the inverse into the forward map.
    pub fn composed_transition(&self, from: usize, to: usize) -> Result<PhraseMap<f64>> {
        self.charts[to].forward.compose(&self.charts[from].inverse)
    }

    /// The declared transition if there is one, else the composed one;
    /// the identity when `from == to`.
    pub fn transition(&self, from: usize, to: usize) -> Result<PhraseMap<f64>> {
        if from >= self.charts.len() || to >= self.charts.len() {
            return Err(Error::IndexOutOfRange { index: from.max(to), dim: self.charts.len() });
        }
        if from == to {
            return Ok(PhraseMap::identity(self.dim, self.level));
        }
        match self.transitions.iter().find(|t| t.from == from && t.to == to) {
            Some(t) => Ok(t.map.clone()),
            None => self.composed_transition(from, to),
        }
    }

    /// Whether some landmark has positive indicator in every listed chart.
    pub fn overlap_exists(&self, charts: &[usize]) -> bool {
        self.landmarks().coords.iter().any(|c| charts.iter().all(|&j| c.get(j).is_some_and(Option::is_some)))
    }

    pub fn tangent_bundle_chart(&self, from: usize, to: usize) -> Result<TangentBundleChart> {
        if from != to && !self.overlap_exists(&[from, to]) {
            return Err(Error::EmptyOverlap(format!(
                "charts {} and {} share no sampled point",
                self.charts[from].id, self.charts[to].id
            )));
        }
        let base = self.transition(from, to)?;
        let fibre = base.derivative();
        Ok(TangentBundleChart { from, to, base, fibre })
    }

    /// `psi_j : M -> S^{2^r m}` in `R^{2^r m + 1}`: inverse stereographic
    /// projection of `phi_j(x) / s`, with `s = smoothstep(min(1, 2 indicator))`
    /// so that `psi_j = stereographic_backward . phi_j` on the deep core
    /// and `psi_j` is the north pole outside `U_j`.
    pub fn chart_to_sphere(&self, j: usize, x: &CdVector<f64>) -> Vec<f64> {
        let c = &self.charts[j];
        let north = sphere::pole_point(Pole::North, self.real_dim());
        let Some(u) = c.coordinates(x) else { return north };
        let t = c.indicator_at(&u);
        if t <= 0.0 {
            return north;
        }
        let s = smoothstep((2.0 * t).min(1.0));
        let q = u.norm_sqr();
        let denom = q + s * s;
        let mut y: Vec<f64> = u.to_real().iter().map(|v| 2.0 * v * s / denom).collect();
        y.push((q - s * s) / denom);
        y
    }

    /// Number of `A_r` coordinates of [`Manifold::product_embedding`].
    pub fn product_dim(&self) -> usize {
        self.charts.len() * (self.dim + 1)
    }

    /// `psi = (psi_1, .., psi_n)` into `A_r^{n(m+1)}`, each sphere factor
    /// `R^{2^r m + 1}` stored in `A_r^{m+1}` with its last coordinate real.
    pub fn product_embedding(&self, x: &CdVector<f64>) -> CdVector<f64> {
        let blocks: Vec<f64> = (0..self.charts.len())
            .flat_map(|j| {
                sphere::sphere_point(self.level, &self.chart_to_sphere(j, x)).expect("sphere shape").to_real()
            })
            .collect();
        CdVector::from_real(self.level, &blocks).expect("block shape")
    }

    /// Run the atlas checks on `samples` points.
    pub fn validate(&self, samples: usize, seed: u64) -> Result<AtlasReport> {
        validate::validate(self, samples, seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holomorphy::real_jacobian;
    use crate::linalg::{largest_principal_angle, rank};
    use crate::sampling::{random_vector, rng_for};

    fn columns(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
        m.column_iter().map(|c| c.iter().copied().collect()).collect()
    }

    #[test]
    fn smoothstep_profile() {
        assert_eq!(smoothstep(0.0), 0.0);
        assert_eq!(smoothstep(1.0), 1.0);
        assert_eq!(smoothstep(0.5), 0.5);
        assert_eq!(smoothstep(-1.0), 0.0);
        assert_eq!(smoothstep(2.0), 1.0);
    }

    #[test]
    fn sphere_charts_agree_with_direct_formulas() {
        let s = Manifold::sphere(2, 1);
        let mut rng = rng_for(30, &[]);
        for _ in 0..100 {
            let y = random_unit(5, &mut rng);
            let x = sphere::sphere_point(2, &y).unwrap();
            for (j, pole) in [Pole::North, Pole::South].into_iter().enumerate() {
                let direct = sphere::stereographic_forward(pole, 2, &y).unwrap();
                let chart = s.charts()[j].forward_map().eval(&x).unwrap();
                assert!(direct.distance(&chart) < 1e-9 * (1.0 + direct.norm()));
            }
        }
    }

    #[test]
    fn samples_are_deep_and_on_the_sphere() {
        let s = Manifold::sphere(2, 1);
        let pts = s.sample_points(300, 1).unwrap();
        for (i, p) in pts.iter().enumerate() {
            assert!((p.norm() - 1.0).abs() < 1e-12);
            assert!(s.indicators(p)[i % 2] > DEEP);
            assert!(s.deep_chart(p).is_ok());
        }
        assert_eq!(s.sample_points(300, 1).unwrap(), pts);
        assert_ne!(s.sample_points(3, 2).unwrap(), pts[..3].to_vec());
    }

    #[test]
    fn poles() {
        let s = Manifold::sphere(2, 1);
        let north = sphere::sphere_point(2, &sphere::pole_point(Pole::North, 4)).unwrap();
        let south = sphere::sphere_point(2, &sphere::pole_point(Pole::South, 4)).unwrap();
        assert_eq!(s.indicators(&north), vec![0.0, 1.0]);
        assert_eq!(s.indicators(&south), vec![1.0, 0.0]);
        assert_eq!(s.deep_chart(&south).unwrap().0, 0);
        // a frame at the south pole spans the equatorial hyperplane
        let f = s.tangent_frame(&south).unwrap();
        assert_eq!(rank(&f.vectors, 1e-9), 4);
        assert!(f.vectors.row(4).iter().chain(f.vectors.rows(5, 3).iter()).all(|v| v.abs() < 1e-12));
        assert!((f.min_singular_value() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn frames_from_overlapping_charts_agree() {
        let s = Manifold::sphere(3, 1);
        for x in s.sample_points(100, 4).unwrap() {
            let ind = s.indicators(&x);
            if ind.iter().all(|&t| t > 0.0) {
                let a = s.tangent_frame_in(&x, 0, s.charts()[0].coordinates(&x).unwrap()).unwrap();
                let b = s.tangent_frame_in(&x, 1, s.charts()[1].coordinates(&x).unwrap()).unwrap();
                let qa = crate::linalg::orthonormalize(&columns(&a.vectors), 1e-9).unwrap();
                let qb = crate::linalg::orthonormalize(&columns(&b.vectors), 1e-9).unwrap();
                assert!(largest_principal_angle(&qa, &qb) < 1e-6);
            }
        }
    }

    #[test]
    fn declared_and_composed_transitions_agree() {
        for man in [Manifold::sphere(2, 2), Manifold::builtin("glued-balls", 2, 1).unwrap()] {
            let mut rng = rng_for(31, &[]);
            for (from, to) in [(0, 1), (1, 0)] {
                let declared = man.transition(from, to).unwrap();
                let composed = man.composed_transition(from, to).unwrap();
                for _ in 0..50 {
                    let u = random_vector(2, man.dim(), &mut rng).scale(0.5);
                    let a = declared.eval(&u).unwrap();
                    let b = composed.eval(&u).unwrap();
                    assert!(a.distance(&b) < 1e-9 * (1.0 + a.norm()), "{}", man.name());
                }
            }
        }
    }

    #[test]
    fn tangent_bundle_identity_and_fibre() {
        let s = Manifold::sphere(2, 1);
        let mut rng = rng_for(32, &[]);
        let id = s.tangent_bundle_chart(0, 0).unwrap();
        let u = random_vector(2, 1, &mut rng);
        let h = random_vector(2, 1, &mut rng);
        assert_eq!(id.apply(&u, &h).unwrap(), (u.clone(), h.clone()));
        let t = s.tangent_bundle_chart(0, 1).unwrap();
        let (_, fh) = t.apply(&u, &h).unwrap();
        let jac = real_jacobian(sphere::sphere_transition, &u, 1e-6).unwrap();
        let fd = &jac * nalgebra::DVector::from_column_slice(&h.to_real());
        let err = fd.iter().zip(fh.to_real()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-6 * (1.0 + fh.norm()), "{err}");
    }

    #[test]
    fn empty_overlap_rejected() {
        let sphere = Manifold::sphere(2, 1);
        let mut charts = sphere.charts().to_vec();
        let mut far = charts[0].clone();
        far.radius = 0.1;
        far.id = "small-north".into();
        charts[1] = Chart::new("small-south", 0.1, charts[1].forward.clone(), charts[1].inverse.clone()).unwrap();
        charts[0] = far;
        let m = Manifold::new("split", 2, 1, 2, charts, Vec::new(), 0).unwrap();
        assert!(matches!(m.tangent_bundle_chart(0, 1), Err(Error::EmptyOverlap(_))));
        assert!(!m.landmarks_connected());
    }

    #[test]
    fn psi_core_and_outside() {
        let s = Manifold::sphere(2, 1);
        let south = sphere::sphere_point(2, &sphere::pole_point(Pole::South, 4)).unwrap();
        let north = sphere::pole_point(Pole::North, 4);
        // deep: psi_j is the inverse stereographic map of the chart value
        for x in s.sample_points(50, 5).unwrap() {
            for j in 0..2 {
                let c = &s.charts()[j];
                if c.indicator(&x) >= 0.99 {
                    let u = c.coordinates(&x).unwrap();
                    let direct = sphere::stereographic_backward(Pole::North, &u);
                    let psi = s.chart_to_sphere(j, &x);
                    assert!(psi.iter().zip(&direct).all(|(a, b)| (a - b).abs() < 1e-12));
                }
            }
        }
        assert_eq!(s.chart_to_sphere(1, &south), north);
        let psi = s.product_embedding(&south);
        assert_eq!(psi.len(), 4);
        assert_eq!(s.product_dim(), 4);
    }

    #[test]
    fn psi_is_injective_on_the_core() {
        let s = Manifold::sphere(2, 1);
        let pts = s.sample_points(1000, 6).unwrap();
        let core: Vec<_> = pts.iter().filter(|p| s.charts()[0].indicator(p) > DEEP).collect();
        let mut min = f64::INFINITY;
        for w in core.windows(2) {
            let a = s.chart_to_sphere(0, w[0]);
            let b = s.chart_to_sphere(0, w[1]);
            min = min.min(a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt());
        }
        assert!(min > 0.0);
    }

    #[test]
    fn product_embedding_has_full_rank() {
        let s = Manifold::sphere(2, 1);
        for x in s.sample_points(200, 7).unwrap() {
            let (j, u) = s.deep_chart(&x).unwrap();
            let c = &s.charts()[j];
            let jac = real_jacobian(|v| Ok(s.product_embedding(&c.inverse(v)?)), &u, 1e-5).unwrap();
            let sv = singular_values(&jac);
            assert_eq!(sv.len(), 4);
            assert!(sv[3] > 1e-3, "{sv:?}");
        }
    }

    #[test]
    fn different_charts_separate_points() {
        let s = Manifold::sphere(2, 1);
        let pts = s.sample_points(40, 8).unwrap();
        for x in &pts {
            for y in &pts {
                if x != y {
                    let jx = s.deep_chart(x).unwrap().0;
                    let gap: f64 = s
                        .chart_to_sphere(jx, x)
                        .iter()
                        .zip(s.chart_to_sphere(jx, y))
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum();
                    assert!(gap > 0.0);
                }
            }
        }
    }

    #[test]
    fn metric_proxy() {
        let s = Manifold::sphere(2, 1);
        assert!(s.landmarks_connected());
        let pts = s.sample_points(100, 9).unwrap();
        for x in &pts {
            assert_eq!(s.distance(x, x), 0.0);
        }
        let north = sphere::sphere_point(2, &sphere::pole_point(Pole::North, 4)).unwrap();
        let south = sphere::sphere_point(2, &sphere::pole_point(Pole::South, 4)).unwrap();
        let d = s.distance(&north, &south);
        assert!(d.is_finite() && d > 0.5, "{d}");
        assert_eq!(d, s.distance(&south, &north));
    }

    #[test]
    fn builtins() {
        for name in BUILTINS {
            let m = Manifold::builtin(name, 2, 1).unwrap();
            assert_eq!(m.name(), name);
        }
        assert!(matches!(Manifold::builtin("torus", 2, 1), Err(Error::UnknownBuiltin(_))));
        let p = Manifold::sphere_product(2, 1);
        assert_eq!((p.dim(), p.model_dim(), p.charts().len()), (2, 4, 4));
        for x in p.sample_points(40, 3).unwrap() {
            let a = crate::linear::CdVector::new(x.components()[..2].to_vec()).unwrap();
            let b = crate::linear::CdVector::new(x.components()[2..].to_vec()).unwrap();
            assert!((a.norm() - 1.0).abs() < 1e-12 && (b.norm() - 1.0).abs() < 1e-12);
        }
    }
}
