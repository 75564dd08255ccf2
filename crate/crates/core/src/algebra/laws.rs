//! The algebra hierarchy: which laws hold at which level, with exact
//! witnesses for the ones that fail.

use serde::Serialize;

use super::{generator_product, CdElement};
use crate::sampling::{random_element, rng_for};

type Exact = CdElement<i64>;

/// Two-generator combinations `i_p + s i_q`, `p < q`, `s = +-1`.
fn two_generator_combos(level: u32) -> Vec<Exact> {
    let dim = 1usize << level;
    let mut out = Vec::new();
    for p in 0..dim {
        for q in (p + 1)..dim {
            for s in [1i64, -1] {
                let mut c = vec![0i64; dim];
                c[p] = 1;
                c[q] = s;
                out.push(Exact::new(level, c).expect("valid"));
            }
        }
    }
    out
}

fn generators(level: u32) -> Vec<Exact> {
    (0..1usize << level).map(|p| Exact::generator(level, p)).collect()
}

/// Generators `(i_p, i_q)` with `i_p i_q != i_q i_p`.
pub fn commutativity_witness(level: u32) -> Option<(Exact, Exact)> {
    let dim = 1usize << level;
    for p in 0..dim {
        for q in 0..dim {
            let a = generator_product(level, p, q);
            let b = generator_product(level, q, p);
            if (a.result, a.sign) != (b.result, b.sign) {
                return Some((Exact::generator(level, p), Exact::generator(level, q)));
            }
        }
    }
    None
}

/// Generators with `(i_p i_q) i_s != i_p (i_q i_s)`.
pub fn associativity_witness(level: u32) -> Option<(Exact, Exact, Exact)> {
    let gens = generators(level);
    for a in &gens {
        for b in &gens {
            for c in &gens {
                if !Exact::associator(a, b, c).expect("same level").is_zero() {
                    return Some((a.clone(), b.clone(), c.clone()));
                }
            }
        }
    }
    None
}

/// Integer elements with `a (a b) != (a a) b`.
///
/// Scans generator pairs first, then two-generator combinations.
pub fn alternativity_witness(level: u32) -> Option<(Exact, Exact)> {
    let gens = generators(level);
    let combos = two_generator_combos(level);
    for pool_a in [&gens, &combos] {
        for pool_b in [&gens, &combos] {
            for a in pool_a.iter() {
                for b in pool_b.iter() {
                    if a * &(a * b) != &(a * a) * b {
                        return Some((a.clone(), b.clone()));
                    }
                }
            }
        }
    }
    None
}

/// Search `(i_p +- i_q)(i_s +- i_t) = 0` over all index and sign choices.
pub fn zero_divisor_scan(level: u32) -> Option<(Exact, Exact)> {
    let combos = two_generator_combos(level);
    for a in &combos {
        for b in &combos {
            if (a * b).is_zero() {
                return Some((a.clone(), b.clone()));
            }
        }
    }
    None
}

/// One row of a law suite.
#[derive(Clone, Debug, Serialize)]
pub struct LawCheck {
    pub name: String,
    /// Whether the law is expected to hold at this level.
    pub expected: bool,
    pub observed: bool,
    pub detail: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LawReport {
    pub level: u32,
    pub samples: usize,
    pub seed: u64,
    pub checks: Vec<LawCheck>,
}

impl LawReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    fn push(&mut self, name: &str, expected: bool, observed: bool, detail: String) {
        self.checks.push(LawCheck {
            name: name.to_string(),
            expected,
            observed,
            detail,
            pass: expected == observed,
        });
    }
}

fn fmt_pair(pair: &Option<(Exact, Exact)>) -> String {
    match pair {
        Some((a, b)) => format!("witness a = {a}, b = {b}"),
        None => "no witness in scan".to_string(),
    }
}

/// Run every law check at `level` with `samples` random elements.
pub fn run_law_suite(level: u32, samples: usize, seed: u64) -> LawReport {
    const TOL: f64 = 1e-12;
    let mut report = LawReport { level, samples, seed, checks: Vec::new() };
    let dim = 1usize << level;

    // exact generator relations
    let mut gen_ok = true;
    let one = Exact::one(level);
    for p in 0..dim {
        let ip = Exact::generator(level, p);
        gen_ok &= &one * &ip == ip && &ip * &one == ip;
        for q in 1..dim {
            let iq = Exact::generator(level, q);
            let pq = &ip * &iq;
            if p == q {
                gen_ok &= pq == Exact::real(level, -1);
            } else if p > 0 {
                gen_ok &= pq == -&(&iq * &ip);
            }
        }
    }
    report.push(
        "generator relations (i0 = 1, ik^2 = -1, ik ij = -ij ik)",
        true,
        gen_ok,
        format!("exhaustive over {} pairs", dim * dim),
    );

    let mut rng = rng_for(seed, &[level as u64]);
    let xs: Vec<_> = (0..samples).map(|_| random_element(level, &mut rng)).collect();
    let ys: Vec<_> = (0..samples).map(|_| random_element(level, &mut rng)).collect();

    if level >= 2 {
        let worst = xs
            .iter()
            .map(|z| z.conj_formula().expect("r >= 2").distance(&z.conj()) / z.norm())
            .fold(0.0, f64::max);
        report.push(
            "conjugation formula equals coefficient negation",
            true,
            worst <= TOL,
            format!("max relative error {worst:e}"),
        );
    }

    let worst = xs
        .iter()
        .map(|a| {
            let n2 = CdElement::real(level, a.norm_sqr());
            let l = (a * &a.conj()).distance(&n2);
            let r = (&a.conj() * a).distance(&n2);
            l.max(r) / a.norm_sqr()
        })
        .fold(0.0, f64::max);
    report.push("a a* = a* a = |a|^2", true, worst <= TOL, format!("max relative error {worst:e}"));

    let worst = xs
        .iter()
        .zip(&ys)
        .map(|(a, b)| (a * b).conj().distance(&(&b.conj() * &a.conj())) / (a.norm() * b.norm()))
        .fold(0.0, f64::max);
    report.push("(ab)* = b* a*", true, worst <= TOL, format!("max relative error {worst:e}"));

    let w = commutativity_witness(level);
    report.push("commutative", level <= 1, w.is_none(), fmt_pair(&w));

    let w = associativity_witness(level);
    report.push(
        "associative",
        level <= 2,
        w.is_none(),
        match &w {
            Some((a, b, c)) => format!("witness {a}, {b}, {c}"),
            None => "no witness over generator triples".into(),
        },
    );

    let w = alternativity_witness(level);
    report.push("alternative a(ab) = (aa)b", level <= 3, w.is_none(), fmt_pair(&w));

    let w = zero_divisor_scan(level);
    report.push("no zero divisors (two-generator scan)", level <= 3, w.is_none(), fmt_pair(&w));

    let (mut c_max, mut tri_ok) = (0.0f64, true);
    for (a, b) in xs.iter().zip(&ys) {
        c_max = c_max.max((a * b).norm() / (a.norm() * b.norm()));
        tri_ok &= (a + b).norm() <= a.norm() + b.norm() + TOL;
    }
    report.push(
        "|ab| = |a||b|",
        level <= 3,
        (c_max - 1.0).abs() <= TOL || samples == 0,
        format!("max |ab|/(|a||b|) = {c_max}"),
    );
    report.push("|a + b| <= |a| + |b|", true, tri_ok, String::new());
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hierarchy_matches_levels() {
        assert!(commutativity_witness(1).is_none());
        assert!(commutativity_witness(2).is_some());
        assert!(associativity_witness(2).is_none());
        assert!(associativity_witness(3).is_some());
        assert!(alternativity_witness(3).is_none());
        let (a, b) = alternativity_witness(4).expect("sedenions are not alternative");
        assert_ne!(&a * &(&a * &b), &(&a * &a) * &b);
    }

    #[test]
    fn zero_divisors_only_from_sedenions() {
        assert!(zero_divisor_scan(2).is_none());
        assert!(zero_divisor_scan(3).is_none());
        let (a, b) = zero_divisor_scan(4).expect("sedenion zero divisor");
        assert!(!a.is_zero() && !b.is_zero());
        assert!((&a * &b).is_zero());
        assert_eq!(a.norm_sqr(), 2);
    }

    #[test]
    fn suite_passes_at_every_small_level() {
        for level in 0..=4 {
            let report = run_law_suite(level, 200, 7);
            for check in &report.checks {
                assert!(check.pass, "r={level}: {check:?}");
            }
        }
    }
}
