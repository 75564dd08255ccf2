//! Sampled atlas checks.

use serde::Serialize;

use super::{Manifold, TangentBundleChart, DEEP};
use crate::error::Result;
use crate::holomorphy::{check_derivative_fd_scaled, DEFAULT_STEP};
use crate::linalg::{largest_principal_angle, orthonormalize};
use crate::linear::CdVector;
use crate::sampling::{random_vector, rng_for};

pub const ROUND_TRIP_TOL: f64 = 1e-9;
pub const HOLOMORPHY_TOL: f64 = 1e-6;
pub const COCYCLE_TOL: f64 = 1e-8;
pub const FRAME_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    AtMost,
    Above,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AtlasCheck {
    pub name: String,
    pub value: f64,
    pub bound: Bound,
    pub tolerance: f64,
    /// How many evaluations went into `value`.
    pub evaluated: usize,
    pub pass: bool,
    pub witness: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AtlasReport {
    pub manifold: String,
    pub level: u32,
    pub dim: usize,
    pub charts: Vec<String>,
    pub samples: usize,
    pub seed: u64,
    pub checks: Vec<AtlasCheck>,
}

impl AtlasReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&AtlasCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Running extremum of a measured quantity with the point attaining it.
struct Tracker {
    name: &'static str,
    bound: Bound,
    tolerance: f64,
    value: f64,
    evaluated: usize,
    witness: Option<Vec<f64>>,
}

impl Tracker {
    fn new(name: &'static str, bound: Bound, tolerance: f64) -> Self {
        let value = match bound {
            Bound::AtMost => 0.0,
            Bound::Above => f64::INFINITY,
        };
        Self { name, bound, tolerance, value, evaluated: 0, witness: None }
    }

    fn record(&mut self, v: f64, at: &CdVector<f64>) {
        self.evaluated += 1;
        let v = match (v.is_nan(), self.bound) {
            (true, Bound::AtMost) => f64::INFINITY,
            (true, Bound::Above) => f64::NEG_INFINITY,
            _ => v,
        };
        let worse = match self.bound {
            Bound::AtMost => v > self.value,
            Bound::Above => v < self.value,
        };
        if worse {
            self.value = v;
            self.witness = Some(at.to_real());
        }
    }

    fn finish(self) -> AtlasCheck {
        let pass = match self.bound {
            Bound::AtMost => self.value <= self.tolerance,
            Bound::Above => self.value > self.tolerance,
        };
        // a lower bound over no samples is vacuous and reported as a failure
        let value = if self.evaluated == 0 && self.bound == Bound::Above { 0.0 } else { self.value };
        let pass = pass && (self.evaluated > 0 || self.bound == Bound::AtMost);
        AtlasCheck {
            name: self.name.into(),
            value,
            bound: self.bound,
            tolerance: self.tolerance,
            evaluated: self.evaluated,
            pass,
            witness: if pass { None } else { self.witness },
        }
    }
}

fn relative(a: &CdVector<f64>, b: &CdVector<f64>) -> f64 {
    a.distance(b) / 1f64.max(b.norm())
}

fn columns(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    m.column_iter().map(|c| c.iter().copied().collect()).collect()
}

pub(super) fn validate(man: &Manifold, samples: usize, seed: u64) -> Result<AtlasReport> {
    let n = man.charts().len();
    let level = man.level();
    let points = man.sample_points(samples, seed)?;
    let mut rng = rng_for(seed, &[0x7661_6c69]);

    let bundles: Vec<Vec<Option<TangentBundleChart>>> =
        (0..n).map(|i| (0..n).map(|j| man.tangent_bundle_chart(i, j).ok()).collect()).collect();

    let mut coverage = Tracker::new("coverage_failures", Bound::AtMost, 0.0);
    let mut round_trip = Tracker::new("chart_round_trip", Bound::AtMost, ROUND_TRIP_TOL);
    let mut declared = Tracker::new("declared_transitions", Bound::AtMost, ROUND_TRIP_TOL);
    let mut involution = Tracker::new("transition_round_trip", Bound::AtMost, ROUND_TRIP_TOL);
    let mut holomorphy = Tracker::new("transition_holomorphy", Bound::AtMost, HOLOMORPHY_TOL);
    let mut cocycle = Tracker::new("tangent_cocycle", Bound::AtMost, COCYCLE_TOL);
    let mut frame_rank = Tracker::new("frame_min_singular_value", Bound::Above, FRAME_TOL);
    let mut frame_agree = Tracker::new("frame_agreement", Bound::AtMost, FRAME_TOL);

    for x in &points {
        let coords: Vec<Option<CdVector<f64>>> = man
            .charts()
            .iter()
            .map(|c| c.coordinates(x).filter(|u| c.indicator_at(u) > 0.0))
            .collect();
        let deep = man.deep_chart(x);
        coverage.record(if deep.is_ok() { 0.0 } else { 1.0 }, x);

        for (c, u) in man.charts().iter().zip(&coords) {
            if let Some(u) = u {
                let back = c.inverse(u).map_or(f64::INFINITY, |y| relative(&y, x));
                let again = c.inverse(u).ok().and_then(|y| c.forward_map().eval(&y).ok());
                round_trip.record(back.max(again.map_or(f64::INFINITY, |v| relative(&v, u))), x);
            }
        }

        for t in man.transitions() {
            if let (Some(u), Some(v)) = (&coords[t.from], &coords[t.to]) {
                let composed = man.composed_transition(t.from, t.to)?;
                let a = t.map.eval(u).map_or(f64::INFINITY, |w| relative(&w, v));
                let b = composed.eval(u).map_or(f64::INFINITY, |w| relative(&w, v));
                declared.record(a.max(b), x);
            }
        }

        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                let (Some(u), Some(_)) = (&coords[i], &coords[j]) else { continue };
                let (Some(tij), Some(tji)) = (&bundles[i][j], &bundles[j][i]) else { continue };
                let back = tij.base.eval(u).and_then(|v| tji.base.eval(&v));
                involution.record(back.map_or(f64::INFINITY, |b| relative(&b, u)), x);
                let h = random_vector(level, man.dim(), &mut rng);
                for p in tij.base.components() {
                    holomorphy.record(check_derivative_fd_scaled(p, u, &h, DEFAULT_STEP).unwrap_or(f64::INFINITY), x);
                }
                // k -> j -> i against k -> i
                for k in (0..n).filter(|&k| k != j) {
                    let Some(w) = &coords[k] else { continue };
                    let (Some(tkj), Some(tki)) = (&bundles[k][j], &bundles[k][i]) else { continue };
                    let h = random_vector(level, man.dim(), &mut rng);
                    let via = tkj.apply(w, &h).and_then(|(v, hv)| tji.apply(&v, &hv));
                    let direct = tki.apply(w, &h);
                    let r = match (via, direct) {
                        (Ok((a, ha)), Ok((b, hb))) => relative(&a, &b).max(relative(&ha, &hb)),
                        _ => f64::INFINITY,
                    };
                    cocycle.record(r, x);
                }
            }
        }

        if let Ok((j, u)) = deep {
            if let Ok(f) = man.tangent_frame_in(x, j, u) {
                frame_rank.record(f.min_singular_value(), x);
                let base = orthonormalize(&columns(&f.vectors), 1e-9).ok();
                for (k, v) in coords.iter().enumerate() {
                    let Some(v) = v.as_ref().filter(|_| k != j && man.charts()[k].indicator(x) > DEEP) else {
                        continue;
                    };
                    let other = man.tangent_frame_in(x, k, v.clone()).ok();
                    let other = other.and_then(|g| orthonormalize(&columns(&g.vectors), 1e-9).ok());
                    let angle = match (&base, other) {
                        (Some(a), Some(b)) => largest_principal_angle(a, &b),
                        _ => f64::INFINITY,
                    };
                    frame_agree.record(angle, x);
                }
            } else {
                frame_rank.record(0.0, x);
            }
        }
    }

    let mut checks: Vec<AtlasCheck> = [coverage, round_trip, declared, involution, holomorphy, cocycle, frame_rank, frame_agree]
        .into_iter()
        .map(Tracker::finish)
        .collect();
    let connected = man.landmarks_connected();
    checks.push(AtlasCheck {
        name: "landmark_graph_connected".into(),
        value: if connected { 1.0 } else { 0.0 },
        bound: Bound::Above,
        tolerance: 0.5,
        evaluated: 1,
        pass: connected,
        witness: None,
    });

    Ok(AtlasReport {
        manifold: man.name().into(),
        level,
        dim: man.dim(),
        charts: man.charts().iter().map(|c| c.id().to_string()).collect(),
        samples,
        seed,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{Manifold, BUILTINS};

    #[test]
    fn builtins_validate() {
        for name in BUILTINS {
            for level in [2, 3] {
                let man = Manifold::builtin(name, level, 1).unwrap();
                let report = man.validate(200, 1).unwrap();
                for c in &report.checks {
                    assert!(c.pass, "{name} r={level}: {c:?}");
                }
                assert!(report.check("tangent_cocycle").unwrap().evaluated > 0);
            }
        }
    }

    #[test]
    fn broken_declared_transition_is_caught() {
        let mut man = Manifold::sphere(2, 1);
        man.transitions[0].map = crate::holomorphy::PhraseMap::identity(1, 2);
        let report = man.validate(50, 2).unwrap();
        let c = report.check("declared_transitions").unwrap();
        assert!(!c.pass && c.witness.is_some());
    }
}
