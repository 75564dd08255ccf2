//! Forbidden directions and the search for a direction avoiding them.
//!
//! First kind: lines through image tangent vectors `df_x v`; projecting
//! along one of them drops the rank of `d(pi_l f)` at `x`. Second kind:
//! secant lines `f(x) - f(y)`; projecting along one identifies `x` and `y`.

use rayon::prelude::*;
use serde::Serialize;

use super::verify::normalized_sigma;
use super::EmbeddingState;
use crate::error::Result;
use crate::linear::CdVector;
use crate::projective::{direction_distance, Direction};
use crate::sampling::{normal, random_unit, rng_for};
use rand::Rng;

const FIRST_TAG: u64 = 0x6669_7273;
const SECOND_TAG: u64 = 0x7365_636f;
const SEARCH_TAG: u64 = 0x7365_6172;
/// Secants shorter than this are redrawn.
pub const MIN_SECANT: f64 = 1e-12;
const MAX_REDRAWS: usize = 16;
/// Every fourth secant pair is near-diagonal.
const NEAR_DIAGONAL_EVERY: usize = 4;
const MAX_POOL: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ForbiddenKind {
    First,
    Second,
}

#[derive(Clone, Debug)]
pub enum Source {
    Point(CdVector<f64>),
    Pair(CdVector<f64>, CdVector<f64>),
}

#[derive(Clone, Debug)]
pub struct ForbiddenSample {
    pub kind: ForbiddenKind,
    pub source: Source,
    pub direction: Direction,
}

#[derive(Clone, Debug, Default)]
pub struct FirstKind {
    pub samples: Vec<ForbiddenSample>,
    pub points: usize,
    pub spread: usize,
    /// Points where the normalized differential fell below the floor, with
    /// the singular value found there.
    pub witnesses: Vec<(Vec<f64>, f64)>,
}

#[derive(Clone, Debug, Default)]
pub struct SecondKind {
    pub samples: Vec<ForbiddenSample>,
    pub requested: usize,
    pub redraws: usize,
    /// Pairs whose secant stayed below [`MIN_SECANT`] through every redraw.
    pub witnesses: Vec<(Vec<f64>, Vec<f64>)>,
}

type PointSamples = (Vec<ForbiddenSample>, Option<(Vec<f64>, f64)>);

/// Tangent directions at `count` points, `spread` per point: the frame
/// columns of `d(f . phi_j^{-1})` first, then Gaussian combinations of them.
pub fn sample_first_kind(
    state: &EmbeddingState,
    count: usize,
    spread: usize,
    sigma_floor: f64,
    seed: u64,
) -> Result<FirstKind> {
    let man = state.manifold();
    let level = state.level();
    let points = man.sample_points(count, rng_seed(seed, FIRST_TAG))?;
    let per_point: Vec<Result<PointSamples>> = points
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            let mut rng = rng_for(seed, &[FIRST_TAG, i as u64]);
            let (j, u) = man.deep_chart(x)?;
            let jac = state.chart_jacobian(j, &u)?;
            let sigma = normalized_sigma(man, j, &u, &jac)?;
            let witness = (sigma <= sigma_floor).then(|| (x.to_real(), sigma));
            let scale = jac.norm().max(f64::MIN_POSITIVE);
            let d = jac.ncols();
            let mut out = Vec::with_capacity(spread);
            for k in 0..spread {
                let v: Vec<f64> = if k < d {
                    jac.column(k).iter().copied().collect()
                } else {
                    let g = nalgebra::DVector::from_fn(d, |_, _| normal(&mut rng));
                    (&jac * g).iter().copied().collect()
                };
                if crate::linalg::norm(&v) <= 1e-14 * scale {
                    continue;
                }
                if let Ok(direction) = Direction::from_real(level, &v) {
                    out.push(ForbiddenSample { kind: ForbiddenKind::First, source: Source::Point(x.clone()), direction });
                }
            }
            Ok((out, witness))
        })
        .collect();
    let mut result = FirstKind { points: count, spread, ..Default::default() };
    for r in per_point {
        let (samples, witness) = r?;
        result.samples.extend(samples);
        result.witnesses.extend(witness);
    }
    Ok(result)
}

fn rng_seed(seed: u64, tag: u64) -> u64 {
    crate::sampling::derive_seed(seed, &[tag])
}

/// `pair_count` secant directions: three in four from independent pairs
/// of a sampled pool, one in four from near-diagonal pairs `(x, x + delta)`
/// with `delta` log-uniform in `[1e-4, 1e-1]` chart units.
pub fn sample_second_kind(state: &EmbeddingState, pair_count: usize, seed: u64) -> Result<SecondKind> {
    let man = state.manifold();
    let level = state.level();
    let pool_size = pair_count.clamp(2, MAX_POOL);
    let pool = man.sample_points(pool_size, rng_seed(seed, SECOND_TAG))?;
    let images: Vec<Vec<f64>> = pool.par_iter().map(|x| state.eval_real(x)).collect();

    type Drawn = (std::result::Result<ForbiddenSample, (Vec<f64>, Vec<f64>)>, usize);
    let drawn: Vec<Result<Drawn>> = (0..pair_count)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, &[SECOND_TAG, i as u64]);
            let near = i % NEAR_DIAGONAL_EVERY == NEAR_DIAGONAL_EVERY - 1;
            let mut last = None;
            for attempt in 0..MAX_REDRAWS {
                let a = rng.random_range(0..pool.len());
                let x = &pool[a];
                let (y, fy) = if near {
                    let delta = 10f64.powf(-4.0 + 3.0 * rng.random::<f64>());
                    let y = man.perturb(x, delta, &mut rng)?;
                    let fy = state.eval_real(&y);
                    (y, fy)
                } else {
                    let mut b = rng.random_range(0..pool.len() - 1);
                    if b >= a {
                        b += 1;
                    }
                    (pool[b].clone(), images[b].clone())
                };
                let diff: Vec<f64> = images[a].iter().zip(&fy).map(|(p, q)| p - q).collect();
                if crate::linalg::norm(&diff) >= MIN_SECANT {
                    if let Ok(direction) = Direction::from_real(level, &diff) {
                        let sample =
                            ForbiddenSample { kind: ForbiddenKind::Second, source: Source::Pair(x.clone(), y), direction };
                        return Ok((Ok(sample), attempt));
                    }
                }
                last = Some((x.to_real(), y.to_real()));
            }
            Ok((Err(last.expect("at least one draw")), MAX_REDRAWS))
        })
        .collect();
    let mut result = SecondKind { requested: pair_count, ..Default::default() };
    for d in drawn {
        let (outcome, redraws) = d?;
        result.redraws += redraws;
        match outcome {
            Ok(s) => result.samples.push(s),
            Err(w) => result.witnesses.push(w),
        }
    }
    Ok(result)
}

/// Outcome of [`find_generic_direction`].
#[derive(Clone, Debug)]
pub struct DirectionSearch {
    /// The first candidate clearing `epsilon`, if any.
    pub direction: Option<Direction>,
    /// Margin of the accepted candidate, or the best margin seen.
    pub margin: f64,
    pub trials_used: usize,
    /// The candidate attaining `margin`.
    pub best: Option<Direction>,
}

/// Smallest distance from `l` to the forbidden lines, `pi / 2` when there
/// are none.
pub fn clearance(l: &Direction, forbidden: &[&Direction]) -> f64 {
    forbidden
        .par_iter()
        .map(|f| direction_distance(l, f))
        .min_by(f64::total_cmp)
        .unwrap_or(std::f64::consts::FRAC_PI_2)
}

/// Draw Gaussian unit candidates in `R^{2^r N}` and return the first whose
/// clearance from every forbidden line is at least `epsilon`.
pub fn find_generic_direction(
    forbidden: &[&Direction],
    level: u32,
    n: usize,
    trials: usize,
    epsilon: f64,
    seed: u64,
) -> Result<DirectionSearch> {
    let mut best: Option<(Direction, f64)> = None;
    for t in 0..trials {
        let mut rng = rng_for(seed, &[SEARCH_TAG, t as u64]);
        let l = Direction::from_real(level, &random_unit(n << level, &mut rng))?;
        let margin = clearance(&l, forbidden);
        if margin >= epsilon {
            return Ok(DirectionSearch { direction: Some(l.clone()), margin, trials_used: t + 1, best: Some(l) });
        }
        if best.as_ref().is_none_or(|b| margin > b.1) {
            best = Some((l, margin));
        }
    }
    let (best, margin) = best.map_or((None, 0.0), |(l, m)| (Some(l), m));
    Ok(DirectionSearch { direction: None, margin, trials_used: trials, best })
}
