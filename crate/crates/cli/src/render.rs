//! Report rendering for the law and atlas suites.

use std::fmt::Write as _;

use serde::Serialize;

use cdholo::algebra::LawReport;
use cdholo::embedding::{REPORT_NOTE, REPORT_VERSION};
use cdholo::manifold::Bound;
use cdholo::manifold::AtlasReport;

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    version: u32,
    kind: &'a str,
    note: &'a str,
    pass: bool,
    report: &'a T,
}

pub fn envelope<T: Serialize + Passes>(kind: &str, report: &T) -> String {
    let env = Envelope { version: REPORT_VERSION, kind, note: REPORT_NOTE, pass: report.passes(), report };
    let mut s = serde_json::to_string_pretty(&env).expect("report serializes");
    s.push('\n');
    s
}

pub trait Passes {
    fn passes(&self) -> bool;
}

impl Passes for LawReport {
    fn passes(&self) -> bool {
        self.all_pass()
    }
}

impl Passes for AtlasReport {
    fn passes(&self) -> bool {
        self.all_pass()
    }
}

fn mark(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

pub fn laws_text(r: &LawReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "law suite at r = {} ({} samples, seed {})", r.level, r.samples, r.seed);
    for c in &r.checks {
        let expect = if c.expected { "holds" } else { "fails" };
        let _ = write!(out, "{:<4} {} (expected: {expect})", mark(c.pass), c.name);
        if !c.detail.is_empty() {
            let _ = write!(out, ": {}", c.detail);
        }
        out.push('\n');
    }
    let _ = writeln!(out, "status: {}", if r.all_pass() { "pass" } else { "fail" });
    out
}

pub fn atlas_text(r: &AtlasReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {REPORT_NOTE}");
    let _ = writeln!(
        out,
        "atlas of {} (r = {}, m = {}, charts {}) on {} samples, seed {}",
        r.manifold,
        r.level,
        r.dim,
        r.charts.join(", "),
        r.samples,
        r.seed
    );
    for c in &r.checks {
        let op = match c.bound {
            Bound::AtMost => "<=",
            Bound::Above => ">",
        };
        let _ = writeln!(
            out,
            "{:<4} {}: {:e} {op} {:e} ({} evaluations)",
            mark(c.pass),
            c.name,
            c.value,
            c.tolerance,
            c.evaluated
        );
        if let Some(w) = &c.witness {
            let _ = writeln!(out, "     witness {w:?}");
        }
    }
    let _ = writeln!(out, "status: {}", if r.all_pass() { "pass" } else { "fail" });
    out
}
