//! Directional derivatives of phrases by the Leibniz rule.
//!
//! The derivative of a phrase in `z in A_r^n` along `h in A_r^n` is a phrase
//! over the doubled variable `(z, h)`: index `k < n` is `z_k`, index `n + k`
//! is `h_k`.
//!
//! - `(u v)' = u' v + u v'`, factor order kept
//! - `(u^-1)' = -(u^-1 (u' u^-1))`
//! - `(u*)' = (u')*`, which is what differentiating the generator-sum form of
//!   the conjugate gives term by term

use super::phrase::{Phrase, PhraseMap};
use crate::algebra::CdElement;
use crate::error::{Error, Result};
use crate::linear::CdVector;
use crate::scalar::Scalar;

impl<T: Scalar> Phrase<T> {
    /// `D_z p . h` as a phrase over `(z, h)`.
    pub fn derivative(&self, input_dim: usize, level: u32) -> Self {
        self.derivative_opt(input_dim).unwrap_or_else(|| Phrase::Const(CdElement::zero(level)))
    }

    /// `None` when the derivative is identically zero.
    fn derivative_opt(&self, n: usize) -> Option<Self> {
        match self {
            Phrase::Var(k) => Some(Phrase::Var(n + k)),
            Phrase::Const(_) => None,
            Phrase::Neg(u) => u.derivative_opt(n).map(Phrase::neg),
            Phrase::Conj(u) => u.derivative_opt(n).map(Phrase::conj),
            Phrase::Add(a, b) => match (a.derivative_opt(n), b.derivative_opt(n)) {
                (None, None) => None,
                (Some(da), None) => Some(da),
                (None, Some(db)) => Some(db),
                (Some(da), Some(db)) => Some(Phrase::add(da, db)),
            },
            Phrase::Mul(a, b) => {
                let left = a.derivative_opt(n).map(|da| Phrase::mul(da, (**b).clone()));
                let right = b.derivative_opt(n).map(|db| Phrase::mul((**a).clone(), db));
                match (left, right) {
                    (None, None) => None,
                    (Some(l), None) => Some(l),
                    (None, Some(r)) => Some(r),
                    (Some(l), Some(r)) => Some(Phrase::add(l, r)),
                }
            }
            Phrase::Inv(u) => u.derivative_opt(n).map(|du| {
                let inv = Phrase::Inv(u.clone());
                Phrase::neg(Phrase::mul(inv.clone(), Phrase::mul(du, inv)))
            }),
        }
    }
}

/// Concatenate `(z, h)` into the doubled variable.
pub fn doubled<T: Scalar>(z: &CdVector<T>, h: &CdVector<T>) -> Result<CdVector<T>> {
    if z.len() != h.len() || z.level() != h.level() {
        return Err(Error::ShapeMismatch("base point and direction differ in shape".into()));
    }
    let mut comps = z.components().to_vec();
    comps.extend_from_slice(h.components());
    CdVector::new(comps)
}

impl<T: Scalar> PhraseMap<T> {
    /// Componentwise derivative, a map on `A_r^{2n}`.
    pub fn derivative(&self) -> PhraseMap<T> {
        let n = self.input_dim();
        let comps = self.components().iter().map(|p| p.derivative(n, self.level())).collect();
        PhraseMap::new(2 * n, self.level(), comps).expect("derivative stays well-formed")
    }

    /// `D_z f . h`.
    pub fn eval_derivative(&self, z: &CdVector<T>, h: &CdVector<T>) -> Result<CdVector<T>> {
        self.derivative().eval(&doubled(z, h)?)
    }
}

/// `eval(D p)(z, h)`.
pub fn eval_derivative<T: Scalar>(p: &Phrase<T>, z: &CdVector<T>, h: &CdVector<T>) -> Result<CdElement<T>> {
    p.derivative(z.len(), z.level()).eval(&doubled(z, h)?)
}

/// `|central difference - eval(D p)(z, h)|` with the central difference
/// `(p(z + t h) - p(z - t h)) / 2t`.
pub fn check_derivative_fd(p: &Phrase<f64>, z: &CdVector<f64>, h: &CdVector<f64>, step: f64) -> Result<f64> {
    let plus = p.eval(&z.try_add(&h.scale(step))?)?;
    let minus = p.eval(&z.try_sub(&h.scale(step))?)?;
    let fd = (&plus - &minus).scale(0.5 / step);
    let analytic = eval_derivative(p, z, h)?;
    Ok(fd.distance(&analytic))
}

/// Finite-difference residual divided by `max(1, |p(z)|, |D p . h|)`.
pub fn check_derivative_fd_scaled(p: &Phrase<f64>, z: &CdVector<f64>, h: &CdVector<f64>, step: f64) -> Result<f64> {
    let residual = check_derivative_fd(p, z, h, step)?;
    let scale = 1f64.max(p.eval(z)?.norm()).max(eval_derivative(p, z, h)?.norm());
    Ok(residual / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_element, random_vector, rng_for};
    use proptest::prelude::*;
    use rand::Rng;

    type P = Phrase<f64>;
    type E = CdElement<f64>;

    #[test]
    fn constants_differentiate_to_zero() {
        let d = P::real(2, 3.0).derivative(1, 2);
        assert_eq!(d, P::Const(E::zero(2)));
    }

    #[test]
    fn identity_differentiates_to_direction() {
        assert_eq!(P::var(0).derivative(1, 2), P::var(1));
    }

    #[test]
    fn leibniz_on_a_square() {
        let p = P::mul(P::var(0), P::var(0));
        let want = P::add(P::mul(P::var(1), P::var(0)), P::mul(P::var(0), P::var(1)));
        assert_eq!(p.derivative(1, 2), want);
    }

    #[test]
    fn fd_examples() {
        let mut rng = rng_for(21, &[]);
        let z = random_vector(2, 1, &mut rng);
        let h = random_vector(2, 1, &mut rng);
        // exactly linear: only rounding of z +- t h remains, which is nil at z = 0
        let zero = CdVector::zeros(2, 1);
        assert!(check_derivative_fd(&P::var(0), &zero, &h, 1e-5).unwrap() <= 1e-12);
        assert!(check_derivative_fd(&P::var(0), &z, &h, 1e-5).unwrap() <= 1e-10);
        let sq = P::mul(P::var(0), P::var(0));
        assert!(check_derivative_fd(&sq, &z, &h, 1e-5).unwrap() <= 1e-8);

        let z = CdVector::new(vec![E::new(3, [1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap()]).unwrap();
        let h = random_vector(3, 1, &mut rng);
        let inv = P::inv(P::var(0));
        assert!(check_derivative_fd(&inv, &z, &h, 1e-5).unwrap() <= 1e-6);
    }

    #[test]
    fn conj_derivative_matches_expanded_form() {
        let mut rng = rng_for(4, &[]);
        for level in [2, 3] {
            let p = P::mul(P::conj(P::var(0)), P::var(1));
            let q = p.expand_conjugations(level).unwrap();
            let z = random_vector(level, 2, &mut rng);
            let h = random_vector(level, 2, &mut rng);
            let a = eval_derivative(&p, &z, &h).unwrap();
            let b = eval_derivative(&q, &z, &h).unwrap();
            assert!(a.distance(&b) < 1e-12);
        }
    }

    #[test]
    fn domain_error_propagates() {
        let p = P::inv(P::var(0));
        let z = CdVector::zeros(2, 1);
        assert!(matches!(check_derivative_fd(&p, &z, &z, 1e-5), Err(Error::PhraseDomain { .. })));
    }

    /// Random phrase over `n` variables from sums, ordered products and
    /// conjugation, with unit-scale constants.
    fn random_phrase(rng: &mut impl Rng, level: u32, n: usize, depth: u32) -> P {
        if depth == 0 || rng.random_bool(0.2) {
            return if rng.random_bool(0.7) {
                P::var(rng.random_range(0..n))
            } else {
                P::constant(random_element(level, rng).scale(0.5))
            };
        }
        match rng.random_range(0..4) {
            0 => P::add(random_phrase(rng, level, n, depth - 1), random_phrase(rng, level, n, depth - 1)),
            1 | 2 => P::mul(random_phrase(rng, level, n, depth - 1), random_phrase(rng, level, n, depth - 1)),
            _ => P::conj(random_phrase(rng, level, n, depth - 1)),
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn leibniz_consistency(seed in any::<u64>(), level in 2u32..=3, n in 1usize..=3) {
            let mut rng = rng_for(seed, &[]);
            let p = random_phrase(&mut rng, level, n, 4);
            let z = random_vector(level, n, &mut rng).scale(0.7);
            let h = random_vector(level, n, &mut rng).normalized().unwrap();
            let r = check_derivative_fd_scaled(&p, &z, &h, 1e-5).unwrap();
            prop_assert!(r <= 1e-6, "residual {r} for {p:?}");
        }

        #[test]
        fn derivative_is_real_linear_in_direction(seed in any::<u64>(), level in 2u32..=3) {
            let mut rng = rng_for(seed, &[]);
            let p = random_phrase(&mut rng, level, 2, 4);
            let z = random_vector(level, 2, &mut rng);
            let h1 = random_vector(level, 2, &mut rng);
            let h2 = random_vector(level, 2, &mut rng);
            let (a, b) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let combo = h1.scale(a).try_add(&h2.scale(b)).unwrap();
            let lhs = eval_derivative(&p, &z, &combo).unwrap();
            let rhs = &eval_derivative(&p, &z, &h1).unwrap().scale(a) + &eval_derivative(&p, &z, &h2).unwrap().scale(b);
            prop_assert!(lhs.distance(&rhs) <= 1e-12 * (1.0 + lhs.norm()));
        }

        #[test]
        fn inverse_derivative_fd(seed in any::<u64>(), level in 2u32..=3) {
            let mut rng = rng_for(seed, &[]);
            let z = random_vector(level, 1, &mut rng);
            prop_assume!(z.norm() > 0.3);
            let h = random_vector(level, 1, &mut rng).normalized().unwrap();
            let r = check_derivative_fd_scaled(&P::inv(P::var(0)), &z, &h, 1e-5).unwrap();
            prop_assert!(r <= 1e-6);
        }
    }
}
