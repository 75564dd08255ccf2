//! Sampled rank and injectivity checks.

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::EmbeddingState;
use crate::error::Result;
use crate::linalg::singular_values;
use crate::linear::CdVector;
use crate::manifold::Manifold;
use crate::sampling::{derive_seed, rng_for};

const IMMERSION_TAG: u64 = 0x696d_6d65;
const INJECTIVITY_TAG: u64 = 0x696e_6a65;
const NEAR_LADDER: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];
const MAX_POOL: usize = 4096;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ImmersionReport {
    pub points: usize,
    pub probes: usize,
    /// Smallest `sigma_min(J R^{-1})`, `F = QR` the chart frame.
    pub min_sigma: f64,
    pub worst_point: Option<Vec<f64>>,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InjectivityReport {
    pub pairs: usize,
    pub near_diagonal: usize,
    pub probes: usize,
    /// Pairs of coincident points, which carry no ratio.
    pub skipped: usize,
    /// Smallest ratio divided by the median ratio.
    pub min_ratio: f64,
    pub min_raw_ratio: f64,
    pub median_ratio: f64,
    pub worst_pair: Option<(Vec<f64>, Vec<f64>)>,
    pub tolerance: f64,
    pub pass: bool,
}

/// `sigma_min(J R^{-1})` where `J = d(f . phi_j^{-1})(u)` and `QR` is the
/// model-space frame `d phi_j^{-1}(u)`: the rank of `df` on unit tangent
/// vectors, free of the chart's own distortion.
pub(crate) fn normalized_sigma(man: &Manifold, chart: usize, u: &CdVector<f64>, jac: &DMatrix<f64>) -> Result<f64> {
    let frame = man.charts()[chart].inverse_jacobian(u)?;
    let r = frame.qr().r();
    let Some(r_inv) = r.try_inverse() else { return Ok(0.0) };
    Ok(singular_values(&(jac * r_inv)).last().copied().unwrap_or(0.0))
}

fn point_sigma(state: &EmbeddingState, x: &CdVector<f64>) -> Result<f64> {
    let man = state.manifold();
    let (j, u) = man.deep_chart(x)?;
    let jac = state.chart_jacobian(j, &u)?;
    normalized_sigma(man, j, &u, &jac)
}

/// Normalized rank check at `count` sampled points plus the given probes.
pub fn verify_immersion(
    state: &EmbeddingState,
    count: usize,
    tolerance: f64,
    seed: u64,
    probes: &[CdVector<f64>],
) -> Result<ImmersionReport> {
    let mut points = state.manifold().sample_points(count, derive_seed(seed, &[IMMERSION_TAG]))?;
    points.extend_from_slice(probes);
    let sigmas: Vec<f64> = points.par_iter().map(|x| point_sigma(state, x)).collect::<Result<_>>()?;
    let mut min_sigma = f64::INFINITY;
    let mut worst = None;
    for (i, &s) in sigmas.iter().enumerate() {
        if s < min_sigma || s.is_nan() {
            min_sigma = if s.is_nan() { 0.0 } else { s };
            worst = Some(i);
        }
    }
    let pass = worst.is_some() && min_sigma > tolerance;
    Ok(ImmersionReport {
        points: count,
        probes: probes.len(),
        min_sigma: if worst.is_some() { min_sigma } else { 0.0 },
        worst_point: worst.map(|i| points[i].to_real()),
        tolerance,
        pass,
    })
}

type RatioEntry = (Option<f64>, CdVector<f64>, CdVector<f64>);

/// Ratios `|f(x) - f(y)| / d(x, y)` over `pairs` sampled pairs, one in four
/// near-diagonal with offsets on the ladder `1e-1 .. 1e-4`, plus the given
/// probe pairs; ratios are divided by their median before comparing with
/// `tolerance`.
pub fn verify_injectivity(
    state: &EmbeddingState,
    pairs: usize,
    tolerance: f64,
    seed: u64,
    probes: &[(CdVector<f64>, CdVector<f64>)],
) -> Result<InjectivityReport> {
    let man = state.manifold();
    let pool = man.sample_points(pairs.clamp(2, MAX_POOL), derive_seed(seed, &[INJECTIVITY_TAG]))?;
    let images: Vec<Vec<f64>> = pool.par_iter().map(|x| state.eval_real(x)).collect();
    let ratio = |x: &CdVector<f64>, fx: &[f64], y: &CdVector<f64>, fy: &[f64]| -> Option<f64> {
        let d = man.distance(x, y);
        if d == 0.0 {
            return None;
        }
        let gap = fx.iter().zip(fy).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        Some(gap / d)
    };

    let sampled: Vec<Result<RatioEntry>> = (0..pairs)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, &[INJECTIVITY_TAG, i as u64]);
            let a = rng.random_range(0..pool.len());
            let x = pool[a].clone();
            if i % 4 == 3 {
                let delta = NEAR_LADDER[(i / 4) % NEAR_LADDER.len()];
                let y = man.perturb(&x, delta, &mut rng)?;
                let fy = state.eval_real(&y);
                Ok((ratio(&x, &images[a], &y, &fy), x, y))
            } else {
                let mut b = rng.random_range(0..pool.len() - 1);
                if b >= a {
                    b += 1;
                }
                Ok((ratio(&x, &images[a], &pool[b], &images[b]), x, pool[b].clone()))
            }
        })
        .collect();
    let mut entries = Vec::with_capacity(pairs + probes.len());
    for s in sampled {
        entries.push(s?);
    }
    for (x, y) in probes {
        entries.push((ratio(x, &state.eval_real(x), y, &state.eval_real(y)), x.clone(), y.clone()));
    }

    let mut values: Vec<f64> = entries.iter().filter_map(|e| e.0).collect();
    let skipped = entries.len() - values.len();
    values.sort_by(f64::total_cmp);
    let median = if values.is_empty() {
        0.0
    } else if values.len() % 2 == 1 {
        values[values.len() / 2]
    } else {
        0.5 * (values[values.len() / 2 - 1] + values[values.len() / 2])
    };
    let mut worst: Option<(f64, usize)> = None;
    for (i, e) in entries.iter().enumerate() {
        if let Some(r) = e.0 {
            if worst.is_none_or(|(w, _)| r < w) {
                worst = Some((r, i));
            }
        }
    }
    let min_raw = worst.map_or(0.0, |w| w.0);
    let min_ratio = if median > 0.0 { min_raw / median } else { 0.0 };
    Ok(InjectivityReport {
        pairs,
        near_diagonal: pairs / 4,
        probes: probes.len(),
        skipped,
        min_ratio,
        min_raw_ratio: min_raw,
        median_ratio: median,
        worst_pair: worst.map(|(_, i)| (entries[i].1.to_real(), entries[i].2.to_real())),
        tolerance,
        pass: worst.is_some() && min_ratio > tolerance,
    })
}
