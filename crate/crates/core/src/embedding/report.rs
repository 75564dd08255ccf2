//! The reduction loop and its report.

use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;

use super::forbidden::{find_generic_direction, sample_first_kind, sample_second_kind};
use super::verify::{verify_immersion, verify_injectivity, ImmersionReport, InjectivityReport};
use super::EmbeddingState;
use crate::error::{Error, Result};
use crate::manifold::Manifold;
use crate::sampling::derive_seed;

pub const REPORT_VERSION: u32 = 1;
pub const REPORT_NOTE: &str = "sampled verification: a pass is evidence, not proof";
const FINAL_TAG: u64 = 0x6669_6e61;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// Into `A_r^{2m+1}`, avoiding tangent and secant lines.
    Embedding,
    /// Into `A_r^{2m}`, avoiding tangent lines only.
    Immersion,
}

impl Target {
    /// Smallest ambient dimension the reduction may reach.
    pub fn dim(self, m: usize) -> usize {
        match self {
            Target::Embedding => 2 * m + 1,
            Target::Immersion => 2 * m,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Target::Embedding => "embedding",
            Target::Immersion => "immersion",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Settings {
    pub tangent_samples: usize,
    pub secant_pairs: usize,
    /// Tangent vectors per sampled point.
    pub spread: usize,
    pub trials: usize,
    pub epsilon: f64,
    pub sigma_tol: f64,
    pub ratio_tol: f64,
    pub verify_points: usize,
    pub verify_pairs: usize,
    pub target_dim: Option<usize>,
    /// Record wall-clock times; off by default so reports are reproducible.
    #[serde(skip)]
    pub timings: bool,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            tangent_samples: 1000,
            secant_pairs: 10_000,
            spread: 8,
            trials: 1000,
            epsilon: 0.05,
            sigma_tol: 1e-6,
            ratio_tol: 1e-4,
            verify_points: 1000,
            verify_pairs: 10_000,
            target_dim: None,
            timings: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    VerificationFailed,
    SearchFailed,
    ImmersionWitness,
    InjectivityWitness,
}

/// Real dimensions of the forbidden sets against the projective space they
/// live in; `first_kind_units` is the count in `A_r` units.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ForbiddenDimensions {
    pub first_kind_real: usize,
    pub first_kind_units: usize,
    pub second_kind_real: usize,
    pub projective_real: usize,
}

impl ForbiddenDimensions {
    fn new(level: u32, m: usize, n: usize) -> Self {
        let d = m << level;
        Self {
            first_kind_real: 2 * d - 1,
            first_kind_units: (2 * m).saturating_sub(1),
            second_kind_real: 2 * d,
            projective_real: (n - 1) << level,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub n_before: usize,
    pub n_after: usize,
    /// Representative of the chosen line, real shadow.
    pub direction: Vec<f64>,
    pub margin: f64,
    pub trials_used: usize,
    pub first_kind_points: usize,
    pub first_kind_samples: usize,
    pub second_kind_pairs: usize,
    pub second_kind_samples: usize,
    pub second_kind_redraws: usize,
    pub forbidden_dimensions: ForbiddenDimensions,
    pub immersion: ImmersionReport,
    pub injectivity: Option<InjectivityReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FailureRecord {
    pub step: usize,
    pub reason: String,
    pub point: Option<Vec<f64>>,
    pub pair: Option<(Vec<f64>, Vec<f64>)>,
    pub direction: Option<Vec<f64>>,
    pub best_margin: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Timings {
    pub total_seconds: f64,
    pub step_seconds: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmbeddingReport {
    pub version: u32,
    pub note: String,
    pub status: Status,
    pub manifold: String,
    pub level: u32,
    pub m: usize,
    pub charts: usize,
    pub target: Target,
    pub start_dim: usize,
    pub target_dim: usize,
    pub final_dim: usize,
    pub seed: u64,
    pub settings: Settings,
    pub steps: Vec<StepRecord>,
    pub immersion: Option<ImmersionReport>,
    pub injectivity: Option<InjectivityReport>,
    pub failure: Option<FailureRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

impl EmbeddingReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# {REPORT_NOTE}");
        let _ = writeln!(
            out,
            "{} of {} (r = {}, m = {}, {} charts): A_r^{} -> A_r^{}, target {}",
            self.target.name(),
            self.manifold,
            self.level,
            self.m,
            self.charts,
            self.start_dim,
            self.final_dim,
            self.target_dim
        );
        for s in &self.steps {
            let _ = write!(
                out,
                "step {}: N {} -> {}, margin {:.6} after {} trials, {} first-kind + {} second-kind directions, min sigma {:.6e}",
                s.step,
                s.n_before,
                s.n_after,
                s.margin,
                s.trials_used,
                s.first_kind_samples,
                s.second_kind_samples,
                s.immersion.min_sigma
            );
            if let Some(inj) = &s.injectivity {
                let _ = write!(out, ", min ratio {:.6e}", inj.min_ratio);
            }
            out.push('\n');
        }
        if let Some(imm) = &self.immersion {
            let _ = writeln!(
                out,
                "immersion: min sigma {:e} over {} points (tolerance {:e}) {}",
                imm.min_sigma,
                imm.points + imm.probes,
                imm.tolerance,
                if imm.pass { "pass" } else { "FAIL" }
            );
        }
        if let Some(inj) = &self.injectivity {
            let _ = writeln!(
                out,
                "injectivity: min ratio {:e} over {} pairs (tolerance {:e}) {}",
                inj.min_ratio,
                inj.pairs + inj.probes,
                inj.tolerance,
                if inj.pass { "pass" } else { "FAIL" }
            );
        }
        if let Some(f) = &self.failure {
            let _ = writeln!(out, "failure at step {}: {}", f.step, f.reason);
            if let Some(p) = &f.point {
                let _ = writeln!(out, "  point {p:?}");
            }
            if let Some((x, y)) = &f.pair {
                let _ = writeln!(out, "  pair {x:?}");
                let _ = writeln!(out, "       {y:?}");
            }
            if let Some(d) = &f.direction {
                let _ = writeln!(out, "  direction {d:?}");
            }
        }
        let _ = writeln!(out, "status: {}", serde_json::to_value(self.status).expect("status").as_str().unwrap_or("?"));
        if let Some(t) = &self.timings {
            let _ = writeln!(out, "time: {:.3} s", t.total_seconds);
        }
        out
    }
}

/// Reduce the product embedding of `manifold` to the target dimension.
pub fn whitney_reduce(
    manifold: Arc<Manifold>,
    target: Target,
    settings: &Settings,
    seed: u64,
) -> Result<(EmbeddingReport, EmbeddingState)> {
    whitney_reduce_from(EmbeddingState::new(manifold), target, settings, seed)
}

/// Reduce an arbitrary starting state.
pub fn whitney_reduce_from(
    start: EmbeddingState,
    target: Target,
    settings: &Settings,
    seed: u64,
) -> Result<(EmbeddingReport, EmbeddingState)> {
    let clock = Instant::now();
    let man = start.manifold_arc().clone();
    let level = man.level();
    let m = man.dim();
    if level < 2 {
        return Err(Error::InvalidArgument(format!(
            "holomorphic embedding needs r >= 2, got r = {level}"
        )));
    }
    let floor = target.dim(m);
    let start_dim = start.ambient_dim();
    let target_dim = settings.target_dim.unwrap_or(floor);
    if target_dim < floor {
        return Err(Error::InvalidArgument(format!(
            "an {} of an m = {m} manifold needs N >= {floor}, asked for {target_dim}",
            target.name()
        )));
    }
    if target_dim > start_dim {
        return Err(Error::InvalidArgument(format!(
            "target N = {target_dim} exceeds the starting dimension {start_dim}"
        )));
    }
    for (name, v) in [
        ("tangent samples", settings.tangent_samples),
        ("spread", settings.spread),
        ("trials", settings.trials),
        ("verify points", settings.verify_points),
    ] {
        if v == 0 {
            return Err(Error::InvalidArgument(format!("{name} must be at least 1")));
        }
    }
    if target == Target::Embedding && (settings.secant_pairs == 0 || settings.verify_pairs == 0) {
        return Err(Error::InvalidArgument("secant pairs and verify pairs must be at least 1".into()));
    }
    for (name, v) in [("epsilon", settings.epsilon), ("sigma tolerance", settings.sigma_tol), ("ratio tolerance", settings.ratio_tol)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
        }
    }

    let mut state = start;
    let mut steps = Vec::new();
    let mut step_seconds = Vec::new();
    let mut failure = None;
    let mut status = Status::Pass;

    while state.ambient_dim() > target_dim {
        let step_clock = Instant::now();
        let step = steps.len();
        let n = state.ambient_dim();
        let step_seed = derive_seed(seed, &[step as u64]);
        let first = sample_first_kind(&state, settings.tangent_samples, settings.spread, settings.sigma_tol, derive_seed(step_seed, &[1]))?;
        if let Some((point, sigma)) = first.witnesses.first() {
            status = Status::ImmersionWitness;
            failure = Some(FailureRecord {
                step,
                reason: format!("differential rank drops before projecting (sigma = {sigma:e})"),
                point: Some(point.clone()),
                pair: None,
                direction: None,
                best_margin: None,
            });
            break;
        }
        let second = if target == Target::Embedding {
            sample_second_kind(&state, settings.secant_pairs, derive_seed(step_seed, &[2]))?
        } else {
            Default::default()
        };
        if let Some((x, y)) = second.witnesses.first() {
            status = Status::InjectivityWitness;
            failure = Some(FailureRecord {
                step,
                reason: "secant stayed below 1e-12 through every redraw".into(),
                point: None,
                pair: Some((x.clone(), y.clone())),
                direction: None,
                best_margin: None,
            });
            break;
        }
        let forbidden: Vec<_> = first.samples.iter().chain(&second.samples).map(|s| &s.direction).collect();
        let search =
            find_generic_direction(&forbidden, level, n, settings.trials, settings.epsilon, derive_seed(step_seed, &[3]))?;
        let Some(l) = search.direction else {
            status = Status::SearchFailed;
            failure = Some(FailureRecord {
                step,
                reason: format!(
                    "no direction cleared epsilon = {} in {} trials (best margin {})",
                    settings.epsilon, search.trials_used, search.margin
                ),
                point: None,
                pair: None,
                direction: search.best.map(|b| b.representative().to_real()),
                best_margin: Some(search.margin),
            });
            break;
        };
        let next = state.reduce_once(&l, search.margin)?;
        let immersion =
            verify_immersion(&next, settings.verify_points, settings.sigma_tol, derive_seed(step_seed, &[4]), &[])?;
        let injectivity = if target == Target::Embedding {
            Some(verify_injectivity(&next, settings.verify_pairs, settings.ratio_tol, derive_seed(step_seed, &[5]), &[])?)
        } else {
            None
        };
        let ok = immersion.pass && injectivity.as_ref().is_none_or(|i| i.pass);
        if !ok {
            status = Status::VerificationFailed;
            failure = Some(FailureRecord {
                step,
                reason: if immersion.pass { "injectivity ratio below tolerance" } else { "rank below tolerance" }.into(),
                point: (!immersion.pass).then(|| immersion.worst_point.clone()).flatten(),
                pair: injectivity.as_ref().filter(|i| !i.pass).and_then(|i| i.worst_pair.clone()),
                direction: Some(l.representative().to_real()),
                best_margin: None,
            });
        }
        steps.push(StepRecord {
            step,
            n_before: n,
            n_after: next.ambient_dim(),
            direction: l.representative().to_real(),
            margin: search.margin,
            trials_used: search.trials_used,
            first_kind_points: first.points,
            first_kind_samples: first.samples.len(),
            second_kind_pairs: second.requested,
            second_kind_samples: second.samples.len(),
            second_kind_redraws: second.redraws,
            forbidden_dimensions: ForbiddenDimensions::new(level, m, n),
            immersion,
            injectivity,
        });
        step_seconds.push(step_clock.elapsed().as_secs_f64());
        state = next;
        if !ok {
            break;
        }
    }

    let (immersion, injectivity) = match steps.last() {
        Some(s) => (Some(s.immersion.clone()), s.injectivity.clone()),
        None if failure.is_none() => {
            let final_seed = derive_seed(seed, &[FINAL_TAG]);
            let imm = verify_immersion(&state, settings.verify_points, settings.sigma_tol, final_seed, &[])?;
            let inj = if target == Target::Embedding {
                Some(verify_injectivity(&state, settings.verify_pairs, settings.ratio_tol, final_seed, &[])?)
            } else {
                None
            };
            if !(imm.pass && inj.as_ref().is_none_or(|i| i.pass)) {
                status = Status::VerificationFailed;
                failure = Some(FailureRecord {
                    step: 0,
                    reason: "starting map fails verification".into(),
                    point: (!imm.pass).then(|| imm.worst_point.clone()).flatten(),
                    pair: inj.as_ref().filter(|i| !i.pass).and_then(|i| i.worst_pair.clone()),
                    direction: None,
                    best_margin: None,
                });
            }
            (Some(imm), inj)
        }
        None => (None, None),
    };

    let report = EmbeddingReport {
        version: REPORT_VERSION,
        note: REPORT_NOTE.into(),
        status,
        manifold: man.name().into(),
        level,
        m,
        charts: man.charts().len(),
        target,
        start_dim,
        target_dim,
        final_dim: state.ambient_dim(),
        seed,
        settings: settings.clone(),
        steps,
        immersion,
        injectivity,
        failure,
        timings: settings
            .timings
            .then(|| Timings { total_seconds: clock.elapsed().as_secs_f64(), step_seconds }),
    };
    Ok((report, state))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Settings {
        Settings {
            tangent_samples: 100,
            secant_pairs: 500,
            verify_points: 100,
            verify_pairs: 500,
            ..Settings::default()
        }
    }

    #[test]
    fn sphere_embedding_small() {
        let man = Arc::new(Manifold::sphere(2, 1));
        let (report, state) = whitney_reduce(man, Target::Embedding, &small(), 7).unwrap();
        assert!(report.passed(), "{}", report.to_text());
        assert_eq!((report.start_dim, report.final_dim, report.steps.len()), (4, 3, 1));
        assert_eq!(state.ambient_dim(), 3);
        let s = &report.steps[0];
        assert_eq!(s.first_kind_samples, 800);
        assert_eq!(s.second_kind_samples, 500);
        assert!(s.margin >= 0.05);
        assert!(report.timings.is_none());
        let pts = state.manifold().sample_points(100, 3).unwrap();
        assert!(state.replay_residual(&pts).unwrap() < 1e-9);
    }

    #[test]
    fn already_at_target() {
        let man = Arc::new(Manifold::sphere(2, 1));
        let settings = Settings { target_dim: Some(4), ..small() };
        let (report, _) = whitney_reduce(man, Target::Embedding, &settings, 1).unwrap();
        assert!(report.passed());
        assert!(report.steps.is_empty());
        assert!(report.immersion.is_some() && report.injectivity.is_some());
    }

    #[test]
    fn argument_checks() {
        let man = Arc::new(Manifold::sphere(1, 1));
        assert!(matches!(whitney_reduce(man, Target::Embedding, &small(), 1), Err(Error::InvalidArgument(_))));
        let man = Arc::new(Manifold::sphere(2, 1));
        let low = Settings { target_dim: Some(2), ..small() };
        assert!(whitney_reduce(man.clone(), Target::Embedding, &low, 1).is_err());
        let high = Settings { target_dim: Some(5), ..small() };
        assert!(whitney_reduce(man.clone(), Target::Embedding, &high, 1).is_err());
        let zero = Settings { epsilon: 0.0, ..small() };
        assert!(whitney_reduce(man, Target::Immersion, &zero, 1).is_err());
    }

    #[test]
    fn impossible_margin_reports_search_failure() {
        let man = Arc::new(Manifold::sphere(2, 1));
        let settings = Settings { epsilon: 1.5, trials: 3, ..small() };
        let (report, state) = whitney_reduce(man, Target::Immersion, &settings, 2).unwrap();
        assert_eq!(report.status, Status::SearchFailed);
        let f = report.failure.unwrap();
        assert!(f.best_margin.unwrap() < 1.5 && f.direction.is_some());
        assert_eq!(state.ambient_dim(), 4);
        assert!(report.immersion.is_none());
    }

    #[test]
    fn json_is_deterministic_and_versioned() {
        let man = Arc::new(Manifold::sphere(2, 1));
        let a = whitney_reduce(man.clone(), Target::Immersion, &small(), 5).unwrap().0.to_json();
        let b = whitney_reduce(Arc::new(Manifold::sphere(2, 1)), Target::Immersion, &small(), 5).unwrap().0.to_json();
        assert_eq!(a, b);
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["version"], 1);
        assert_eq!(v["note"], REPORT_NOTE);
        assert_eq!(v["final_dim"], 2);
        assert!(v.get("timings").is_none());
        let timed = Settings { timings: true, ..small() };
        let t = whitney_reduce(man, Target::Immersion, &timed, 5).unwrap().0;
        assert!(t.timings.is_some());
    }
}
