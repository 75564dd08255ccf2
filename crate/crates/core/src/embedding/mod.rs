//! Whitney reduction: start from the product embedding `psi : M -> A_r^N`,
//! then repeatedly pick a direction `l` away from sampled tangent and secant
//! lines and replace the map by `pi_l . f : M -> A_r^{N-1}`.
//!
//! The map after `k` steps is `P_k .. P_1 psi` with `P_i` the real matrices
//! of the chosen projections; the state keeps both the product and the
//! history it came from.

mod forbidden;
mod report;
mod verify;

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::holomorphy::{real_jacobian, DEFAULT_STEP};
use crate::linear::CdVector;
use crate::manifold::Manifold;
use crate::projective::{hyperplane_of, Direction};

pub use forbidden::{
    find_generic_direction, sample_first_kind, sample_second_kind, DirectionSearch, FirstKind, ForbiddenKind,
    ForbiddenSample, SecondKind, Source,
};
pub use report::{
    whitney_reduce, whitney_reduce_from, EmbeddingReport, FailureRecord, ForbiddenDimensions, Settings, Status,
    StepRecord, Target, Timings, REPORT_NOTE, REPORT_VERSION,
};
pub use verify::{verify_immersion, verify_injectivity, ImmersionReport, InjectivityReport};

/// A real-smooth map from model space to `A_r^dim`.
pub type MapFn = Arc<dyn Fn(&CdVector<f64>) -> CdVector<f64> + Send + Sync>;

#[derive(Clone)]
pub enum BaseMap {
    /// The product of chart-to-sphere maps.
    Product,
    Custom { dim: usize, map: MapFn },
}

impl std::fmt::Debug for BaseMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BaseMap::Product => write!(f, "Product"),
            BaseMap::Custom { dim, .. } => write!(f, "Custom({dim})"),
        }
    }
}

/// One accepted projection.
#[derive(Clone, Debug)]
pub struct HistoryEntry {
    pub direction: Direction,
    pub margin: f64,
}

#[derive(Clone, Debug)]
pub struct EmbeddingState {
    manifold: Arc<Manifold>,
    base: BaseMap,
    base_dim: usize,
    matrix: DMatrix<f64>,
    history: Vec<HistoryEntry>,
}

impl EmbeddingState {
    /// The product embedding into `A_r^{n(m+1)}`.
    pub fn new(manifold: Arc<Manifold>) -> Self {
        let base_dim = manifold.product_dim();
        Self::with_base(manifold, BaseMap::Product, base_dim)
    }

    pub fn custom(manifold: Arc<Manifold>, dim: usize, map: MapFn) -> Self {
        Self::with_base(manifold, BaseMap::Custom { dim, map }, dim)
    }

    fn with_base(manifold: Arc<Manifold>, base: BaseMap, base_dim: usize) -> Self {
        let real = base_dim << manifold.level();
        Self { manifold, base, base_dim, matrix: DMatrix::identity(real, real), history: Vec::new() }
    }

    pub fn manifold(&self) -> &Manifold {
        &self.manifold
    }

    pub fn manifold_arc(&self) -> &Arc<Manifold> {
        &self.manifold
    }

    pub fn level(&self) -> u32 {
        self.manifold.level()
    }

    /// `N`, the current ambient dimension in `A_r` units.
    pub fn ambient_dim(&self) -> usize {
        self.matrix.nrows() >> self.level()
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn history(&self) -> &[HistoryEntry] {
        &self.history
    }

    /// Accumulated real matrix `P_k .. P_1`.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn base_real(&self, x: &CdVector<f64>) -> Vec<f64> {
        match &self.base {
            BaseMap::Product => self.manifold.product_embedding(x).to_real(),
            BaseMap::Custom { map, .. } => map(x).to_real(),
        }
    }

    pub fn eval_real(&self, x: &CdVector<f64>) -> Vec<f64> {
        (&self.matrix * DVector::from_vec(self.base_real(x))).iter().copied().collect()
    }

    pub fn eval(&self, x: &CdVector<f64>) -> CdVector<f64> {
        CdVector::from_real(self.level(), &self.eval_real(x)).expect("block shape")
    }

    /// Central-difference Jacobian of `f . phi_j^{-1}` at `u`.
    pub fn chart_jacobian(&self, chart: usize, u: &CdVector<f64>) -> Result<DMatrix<f64>> {
        let c = &self.manifold.charts()[chart];
        let base = real_jacobian(
            |v| CdVector::from_real(self.level(), &self.base_real(&c.inverse(v)?)),
            u,
            DEFAULT_STEP,
        )?;
        Ok(&self.matrix * base)
    }

    /// `pi_l . f`, recording `l` with its clearance margin.
    pub fn reduce_once(&self, l: &Direction, margin: f64) -> Result<Self> {
        if l.level() != self.level() || l.len() != self.ambient_dim() {
            return Err(Error::ShapeMismatch(format!(
                "direction in A_{}^{} for a map into A_{}^{}",
                l.level(),
                l.len(),
                self.level(),
                self.ambient_dim()
            )));
        }
        if self.ambient_dim() < 2 {
            return Err(Error::InvalidArgument("cannot project below A_r^1".into()));
        }
        let h = hyperplane_of(l)?;
        let mut next = self.clone();
        next.matrix = h.real_matrix() * &self.matrix;
        next.history.push(HistoryEntry { direction: l.clone(), margin });
        Ok(next)
    }

    /// Rebuild the accumulated matrix from the history alone.
    pub fn replay(&self) -> Result<Self> {
        let mut state = Self::with_base(self.manifold.clone(), self.base.clone(), self.base_dim);
        for entry in &self.history {
            state = state.reduce_once(&entry.direction, entry.margin)?;
        }
        Ok(state)
    }

    /// `max |f(x) - replay(f)(x)|` over the given points.
    pub fn replay_residual(&self, points: &[CdVector<f64>]) -> Result<f64> {
        let replayed = self.replay()?;
        Ok(points.iter().map(|x| self.eval(x).distance(&replayed.eval(x))).fold(0.0, f64::max))
    }
}
