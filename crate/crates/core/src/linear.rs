//! Finite-dimensional modules `A_r^n`.

use std::fmt;

use serde::Serialize;

use crate::algebra::{generator_product, CdElement};
use crate::error::{Error, Result};
use crate::sampling::{random_element, random_vector, rng_for};
use crate::scalar::{RealScalar, Scalar};

/// A vector of `n >= 1` Cayley-Dickson coordinates of a common level.
#[derive(Clone, PartialEq)]
pub struct CdVector<T> {
    level: u32,
    components: Vec<CdElement<T>>,
}

impl<T: Scalar> CdVector<T> {
    pub fn new(components: Vec<CdElement<T>>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::ShapeMismatch("vector needs at least one component".into()))?;
        let level = first.level();
        if let Some(bad) = components.iter().find(|c| c.level() != level) {
            return Err(Error::LevelMismatch { left: level, right: bad.level() });
        }
        Ok(Self { level, components })
    }

    pub fn zeros(level: u32, len: usize) -> Self {
        assert!(len >= 1, "vector needs at least one component");
        Self { level, components: vec![CdElement::zero(level); len] }
    }

    /// Standard base vector `e_j` (0-based).
    pub fn basis(level: u32, len: usize, j: usize) -> Self {
        let mut v = Self::zeros(level, len);
        v.components[j] = CdElement::one(level);
        v
    }

    /// Group a real vector of length `n 2^r` into `n` coordinates.
    pub fn from_real(level: u32, real: &[T]) -> Result<Self> {
        crate::algebra::check_level(level)?;
        let dim = 1usize << level;
        if real.is_empty() || !real.len().is_multiple_of(dim) {
            return Err(Error::ShapeMismatch(format!(
                "real length {} is not a positive multiple of {dim}",
                real.len()
            )));
        }
        let components = real.chunks(dim).map(|c| CdElement::new(level, c.iter().copied())).collect::<Result<_>>()?;
        Ok(Self { level, components })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Length of the real shadow, `n 2^r`.
    pub fn real_dim(&self) -> usize {
        self.len() << self.level
    }

    pub fn components(&self) -> &[CdElement<T>] {
        &self.components
    }

    pub fn component(&self, k: usize) -> &CdElement<T> {
        &self.components[k]
    }

    pub fn into_components(self) -> Vec<CdElement<T>> {
        self.components
    }

    /// Flatten to the real shadow, coordinate-major.
    pub fn to_real(&self) -> Vec<T> {
        self.components.iter().flat_map(|c| c.coeffs().iter().copied()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(CdElement::is_zero)
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.level != other.level {
            return Err(Error::LevelMismatch { left: self.level, right: other.level });
        }
        if self.len() != other.len() {
            return Err(Error::ShapeMismatch(format!("lengths {} and {}", self.len(), other.len())));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        Ok(Self {
            level: self.level,
            components: self.components.iter().zip(&other.components).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        Ok(Self {
            level: self.level,
            components: self.components.iter().zip(&other.components).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, t: T) -> Self {
        Self { level: self.level, components: self.components.iter().map(|c| c.scale(t)).collect() }
    }

    /// `b x`, coordinatewise.
    pub fn left_mul(&self, b: &CdElement<T>) -> Result<Self> {
        let components = self.components.iter().map(|c| b.try_mul(c)).collect::<Result<_>>()?;
        Ok(Self { level: self.level, components })
    }

    /// `x b`, coordinatewise.
    pub fn right_mul(&self, b: &CdElement<T>) -> Result<Self> {
        let components = self.components.iter().map(|c| c.try_mul(b)).collect::<Result<_>>()?;
        Ok(Self { level: self.level, components })
    }

    /// Hermitian product `<x, y> = sum_j x_j* y_j`.
    pub fn hermitian(&self, other: &Self) -> Result<CdElement<T>> {
        self.check_shape(other)?;
        let mut acc = CdElement::zero(self.level);
        for (x, y) in self.components.iter().zip(&other.components) {
            acc = &acc + &(&x.conj() * y);
        }
        Ok(acc)
    }

    /// Sum of squares of every real coefficient.
    pub fn norm_sqr(&self) -> T {
        self.components.iter().fold(T::zero(), |acc, c| acc + c.norm_sqr())
    }

    /// Real inner product of the real shadows.
    pub fn real_dot(&self, other: &Self) -> T {
        self.components.iter().zip(&other.components).fold(T::zero(), |acc, (a, b)| acc + a.dot(b))
    }

    /// Split into the `2^r` real parts `f_j`, one per generator.
    pub fn decompose(&self) -> ComponentDecomposition<T> {
        let dim = 1usize << self.level;
        let real_parts = (0..dim).map(|j| self.components.iter().map(|c| c.coeff(j)).collect()).collect();
        ComponentDecomposition { level: self.level, real_parts }
    }

    /// Coordinate projection `P^L(x) = sum_{j in L} x_j e_j` (0-based indices).
    pub fn project_span(&self, index_set: &[usize]) -> Result<Self> {
        let mut out = Self::zeros(self.level, self.len());
        for &j in index_set {
            if j >= self.len() {
                return Err(Error::IndexOutOfRange { index: j, dim: self.len() });
            }
            out.components[j] = self.components[j].clone();
        }
        Ok(out)
    }
}

impl<T: RealScalar> CdVector<T> {
    /// Induced norm `sqrt(<f, f>)`.
    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn distance(&self, other: &Self) -> T {
        self.components
            .iter()
            .zip(&other.components)
            .fold(T::zero(), |acc, (a, b)| {
                let d = a.distance(b);
                acc + d * d
            })
            .sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == T::zero() {
            return Err(Error::ZeroVector);
        }
        Ok(self.scale(T::one() / n))
    }
}

impl<T: fmt::Debug> fmt::Debug for CdVector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.components).finish()
    }
}

/// `<x, y>` as a free function.
pub fn hermitian_product<T: Scalar>(x: &CdVector<T>, y: &CdVector<T>) -> Result<CdElement<T>> {
    x.hermitian(y)
}

/// The real parts `f_j` of a vector, `x = sum_j f_j i_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentDecomposition<T> {
    pub level: u32,
    /// `real_parts[j][k]` is the `i_j` coefficient of coordinate `k`.
    pub real_parts: Vec<Vec<T>>,
}

impl<T: Scalar> ComponentDecomposition<T> {
    pub fn reassemble(&self) -> Result<CdVector<T>> {
        let len = self.real_parts.first().map_or(0, Vec::len);
        let components = (0..len)
            .map(|k| CdElement::new(self.level, self.real_parts.iter().map(|part| part[k])))
            .collect::<Result<_>>()?;
        CdVector::new(components)
    }
}

fn real_dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

/// `<f, g> = sum_{j,k} <f_j, g_k> i_j* i_k` from the real parts, with the
/// Euclidean dot product on each `X_j`.
pub fn component_scalar_product<T: Scalar>(f: &CdVector<T>, g: &CdVector<T>) -> Result<CdElement<T>> {
    f.check_shape(g)?;
    let level = f.level();
    let dim = 1usize << level;
    let fd = f.decompose();
    let gd = g.decompose();
    let mut coeffs = vec![T::zero(); dim];
    for j in 0..dim {
        for k in 0..dim {
            let d = real_dot(&fd.real_parts[j], &gd.real_parts[k]);
            if d.is_zero() {
                continue;
            }
            // i_j* i_k = i_k for j = 0, -(i_j i_k) otherwise
            let g = generator_product(level, j, k);
            let positive = (g.sign > 0) == (j == 0);
            coeffs[g.result] = if positive { coeffs[g.result] + d } else { coeffs[g.result] - d };
        }
    }
    CdElement::new(level, coeffs)
}

/// Largest residuals of a sampled two-sided module-homomorphism check.
#[derive(Clone, Debug, Serialize)]
pub struct HomomorphismReport {
    pub samples: usize,
    /// `max |theta(b x) - b theta(x)|`
    pub left: f64,
    /// `max |theta(x b) - theta(x) b|`
    pub right: f64,
    /// `max |theta(x + y) - theta(x) - theta(y)|`
    pub additive: f64,
    /// `(b, x)` attaining the largest left or right residual.
    pub worst: Option<(Vec<f64>, Vec<f64>)>,
}

impl HomomorphismReport {
    pub fn max_residual(&self) -> f64 {
        self.left.max(self.right).max(self.additive)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_residual() <= tol
    }
}

/// Sample `theta(bx) = b theta(x)`, `theta(xb) = theta(x) b` and additivity
/// over random `b in A_r`, `x, y in A_r^n`.
pub fn check_module_homomorphism<F>(map: F, level: u32, len: usize, samples: usize, seed: u64) -> Result<HomomorphismReport>
where
    F: Fn(&CdVector<f64>) -> Result<CdVector<f64>>,
{
    let mut rng = rng_for(seed, &[level as u64, len as u64]);
    let mut report = HomomorphismReport { samples, left: 0.0, right: 0.0, additive: 0.0, worst: None };
    let mut worst_lr = -1.0;
    for _ in 0..samples {
        let b = random_element(level, &mut rng);
        let x = random_vector(level, len, &mut rng);
        let y = random_vector(level, len, &mut rng);
        let tx = map(&x)?;
        let left = map(&x.left_mul(&b)?)?.distance(&tx.left_mul(&b)?);
        let right = map(&x.right_mul(&b)?)?.distance(&tx.right_mul(&b)?);
        let additive = map(&x.try_add(&y)?)?.distance(&tx.try_add(&map(&y)?)?);
        report.left = report.left.max(left);
        report.right = report.right.max(right);
        report.additive = report.additive.max(additive);
        if left.max(right) > worst_lr {
            worst_lr = left.max(right);
            report.worst = Some((b.coeffs().to_vec(), x.to_real()));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type V = CdVector<f64>;
    type E = CdElement<f64>;
    type IV = CdVector<i64>;
    type IE = CdElement<i64>;

    fn ivec(level: u32, coords: &[&[i64]]) -> IV {
        IV::new(coords.iter().map(|c| IE::new(level, c.iter().copied()).unwrap()).collect()).unwrap()
    }

    #[test]
    fn orthonormal_base() {
        for j in 0..3 {
            for k in 0..3 {
                let p = V::basis(2, 3, j).hermitian(&V::basis(2, 3, k)).unwrap();
                let want = if j == k { E::one(2) } else { E::zero(2) };
                assert_eq!(p, want);
            }
        }
    }

    #[test]
    fn hermitian_examples() {
        let x = ivec(2, &[&[0, 1, 0, 0], &[0, 0, 1, 0]]);
        assert_eq!(x.hermitian(&x).unwrap(), IE::real(2, 2));
        let a = ivec(2, &[&[1, 0, 0, 0], &[0, 1, 0, 0]]);
        let b = ivec(2, &[&[0, 1, 0, 0], &[1, 0, 0, 0]]);
        assert_eq!(a.hermitian(&b).unwrap(), IE::zero(2));
    }

    #[test]
    fn shape_mismatch_rejected() {
        let a = V::zeros(2, 2);
        assert!(matches!(a.hermitian(&V::zeros(2, 3)), Err(Error::ShapeMismatch(_))));
        assert!(matches!(a.hermitian(&V::zeros(3, 2)), Err(Error::LevelMismatch { .. })));
        assert!(component_scalar_product(&a, &V::zeros(2, 3)).is_err());
    }

    #[test]
    fn expansion_identity_exact() {
        let f = ivec(3, &[&[1, -2, 0, 3, 1, 0, -1, 2], &[0, 1, 1, -1, 2, 3, 0, -2]]);
        let g = ivec(3, &[&[2, 0, 1, 0, -1, 1, 1, 0], &[-1, 1, 0, 2, 0, 0, 1, 1]]);
        assert_eq!(component_scalar_product(&f, &g).unwrap(), f.hermitian(&g).unwrap());
        let e1 = IV::basis(3, 2, 0);
        assert_eq!(component_scalar_product(&e1, &e1).unwrap(), IE::one(3));
    }

    #[test]
    fn mixed_components_land_on_i1() {
        // f only in X_0, g only in X_1
        let f = ivec(2, &[&[2, 0, 0, 0], &[1, 0, 0, 0]]);
        let g = ivec(2, &[&[0, 3, 0, 0], &[0, -1, 0, 0]]);
        let p = component_scalar_product(&f, &g).unwrap();
        assert_eq!(p, IE::new(2, [0, 5, 0, 0]).unwrap());
    }

    #[test]
    fn norms() {
        assert_eq!(V::basis(2, 2, 0).norm(), 1.0);
        let v = V::new(vec![E::real(2, 3.0), E::new(2, [0.0, 0.0, 4.0, 0.0]).unwrap()]).unwrap();
        assert_eq!(v.norm(), 5.0);
    }

    #[test]
    fn projection_examples() {
        let mut rng = rng_for(3, &[]);
        let x = random_vector(2, 3, &mut rng);
        assert_eq!(x.project_span(&[0, 1, 2]).unwrap(), x);
        assert_eq!(x.project_span(&[]).unwrap(), V::zeros(2, 3));
        let p = x.project_span(&[0, 2]).unwrap();
        assert_eq!(p.component(0), x.component(0));
        assert!(p.component(1).is_zero());
        assert_eq!(p.component(2), x.component(2));
        assert_eq!(x.project_span(&[3]), Err(Error::IndexOutOfRange { index: 3, dim: 3 }));
    }

    #[test]
    fn homomorphism_checks() {
        let id = check_module_homomorphism(|x| Ok(x.clone()), 3, 3, 50, 1).unwrap();
        assert_eq!(id.max_residual(), 0.0);

        let proj = check_module_homomorphism(|x| x.project_span(&[0, 2]), 3, 3, 50, 1).unwrap();
        assert!(proj.passes(1e-12), "{proj:?}");

        let i1 = E::generator(3, 1);
        let i2 = E::generator(3, 2);
        let twisted = check_module_homomorphism(|x| x.left_mul(&i1)?.right_mul(&i2), 3, 2, 50, 1).unwrap();
        assert!(twisted.max_residual() > 1e-3);
        assert!(twisted.worst.is_some());
        assert!(twisted.additive < 1e-12);
    }

    #[test]
    fn decomposition_reassembles() {
        let mut rng = rng_for(5, &[]);
        let x = random_vector(3, 4, &mut rng);
        let d = x.decompose();
        assert_eq!(d.real_parts.len(), 8);
        assert_eq!(d.reassemble().unwrap(), x);
    }

    proptest! {
        #[test]
        fn expansion_identity_random(seed in any::<u64>(), level in 2u32..=4, len in 1usize..5) {
            let mut rng = rng_for(seed, &[]);
            let f = random_vector(level, len, &mut rng);
            let g = random_vector(level, len, &mut rng);
            let a = component_scalar_product(&f, &g).unwrap();
            let b = f.hermitian(&g).unwrap();
            prop_assert!(a.distance(&b) <= 1e-12 * (1.0 + f.norm() * g.norm()));
        }

        #[test]
        fn hermitian_symmetry_and_positivity(seed in any::<u64>(), level in 0u32..=4, len in 1usize..5) {
            let mut rng = rng_for(seed, &[]);
            let x = random_vector(level, len, &mut rng);
            let y = random_vector(level, len, &mut rng);
            let xy = x.hermitian(&y).unwrap();
            let yx = y.hermitian(&x).unwrap();
            prop_assert!(xy.distance(&yx.conj()) <= 1e-12 * (1.0 + x.norm() * y.norm()));
            let xx = x.hermitian(&x).unwrap();
            prop_assert!(xx.re() >= 0.0);
            prop_assert!(xx.coeffs()[1..].iter().all(|c| c.abs() <= 1e-12 * xx.re()));
            prop_assert!((xx.re().sqrt() - x.norm()).abs() <= 1e-12 * (1.0 + x.norm()));
        }

        #[test]
        fn norm_conditions(seed in any::<u64>(), level in 0u32..=4, len in 1usize..5) {
            let mut rng = rng_for(seed, &[]);
            let a = random_element(level, &mut rng);
            let x = random_vector(level, len, &mut rng);
            let y = random_vector(level, len, &mut rng);
            let slack = 1e-12 * (1.0 + a.norm() * x.norm());
            // sedenion norms are only submultiplicative up to sqrt(2)
            let c = if level <= 3 { 1.0 } else { std::f64::consts::SQRT_2 };
            prop_assert!(x.left_mul(&a).unwrap().norm() <= c * a.norm() * x.norm() + slack);
            prop_assert!(x.right_mul(&a).unwrap().norm() <= c * a.norm() * x.norm() + slack);
            prop_assert!(x.try_add(&y).unwrap().norm() <= x.norm() + y.norm() + 1e-12);
            // single real-component vector x_j in X_j
            let real_part = CdVector::new(x.components().iter().map(|c| E::real(level, c.re())).collect()).unwrap();
            let lhs = real_part.left_mul(&a).unwrap().norm();
            prop_assert!((lhs - a.norm() * real_part.norm()).abs() <= slack);
        }

        #[test]
        fn projection_commutes_with_scalars(seed in any::<u64>(), mask in 0u8..16) {
            let mut rng = rng_for(seed, &[]);
            let x = random_vector(3, 4, &mut rng);
            let b = random_element(3, &mut rng);
            let set: Vec<usize> = (0..4).filter(|j| mask >> j & 1 == 1).collect();
            let p = x.project_span(&set).unwrap();
            prop_assert_eq!(p.project_span(&set).unwrap(), p.clone());
            prop_assert_eq!(x.left_mul(&b).unwrap().project_span(&set).unwrap(), p.left_mul(&b).unwrap());
            prop_assert_eq!(x.right_mul(&b).unwrap().project_span(&set).unwrap(), p.right_mul(&b).unwrap());
        }

        #[test]
        fn real_component_products_are_scalar_products(seed in any::<u64>()) {
            // positivity, symmetry and bilinearity of the Euclidean product on each X_j
            let mut rng = rng_for(seed, &[]);
            let x = random_vector(2, 3, &mut rng).decompose();
            let y = random_vector(2, 3, &mut rng).decompose();
            let z = random_vector(2, 3, &mut rng).decompose();
            let (a, b) = (crate::sampling::normal(&mut rng), crate::sampling::normal(&mut rng));
            for j in 0..4 {
                let (xj, yj, zj) = (&x.real_parts[j], &y.real_parts[j], &z.real_parts[j]);
                prop_assert!(real_dot(xj, xj) > 0.0);
                prop_assert!((real_dot(xj, yj) - real_dot(yj, xj)).abs() < 1e-12);
                let comb: Vec<f64> = xj.iter().zip(yj).map(|(p, q)| a * p + b * q).collect();
                let lhs = real_dot(&comb, zj);
                let rhs = a * real_dot(xj, zj) + b * real_dot(yj, zj);
                prop_assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs()));
            }
        }
    }
}
