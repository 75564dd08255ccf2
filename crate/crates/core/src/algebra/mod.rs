//! Cayley-Dickson algebras `A_r` of arbitrary level.
//!
//! An element of level `r` carries `2^r` coefficients, the coefficient of
//! generator `i_p` stored at index `p`; index 0 is the real part. Levels
//! 0..=4 are the reals, complexes, quaternions, octonions and sedenions.
//!
//! Arithmetic is generic over [`Scalar`]: use `i64` for exact table checks,
//! `Ratio<i64>` for exact inverses, `f64` for everything numeric.

mod laws;
mod table;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::scalar::{RealScalar, Scalar};

pub use laws::{
    alternativity_witness, associativity_witness, commutativity_witness, run_law_suite,
    zero_divisor_scan, LawCheck, LawReport,
};
pub use table::{format_table, generator_product, generator_table, GeneratorProduct};

/// Largest supported level; tables grow as `4^r`.
pub const MAX_LEVEL: u32 = 6;

pub(crate) type Coeffs<T> = SmallVec<[T; 16]>;

/// One Cayley-Dickson number.
#[derive(Clone, PartialEq)]
pub struct CdElement<T> {
    level: u32,
    coeffs: Coeffs<T>,
}

impl<T: Scalar> CdElement<T> {
    pub fn new(level: u32, coeffs: impl IntoIterator<Item = T>) -> Result<Self> {
        check_level(level)?;
        let coeffs: Coeffs<T> = coeffs.into_iter().collect();
        let expected = 1usize << level;
        if coeffs.len() != expected {
            return Err(Error::CoefficientCount { level, expected, got: coeffs.len() });
        }
        Ok(Self { level, coeffs })
    }

    pub fn zero(level: u32) -> Self {
        Self::real(level, T::zero())
    }

    pub fn one(level: u32) -> Self {
        Self::real(level, T::one())
    }

    /// `x * i_0`.
    pub fn real(level: u32, x: T) -> Self {
        assert!(level <= MAX_LEVEL, "level {level} exceeds MAX_LEVEL");
        let mut coeffs: Coeffs<T> = SmallVec::from_elem(T::zero(), 1 << level);
        coeffs[0] = x;
        Self { level, coeffs }
    }

    /// The generator `i_p`.
    ///
    /// # Panics
    /// If `p >= 2^level`.
    pub fn generator(level: u32, p: usize) -> Self {
        let mut e = Self::zero(level);
        e.coeffs[p] = T::one();
        e
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Real dimension `2^r`.
    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, p: usize) -> T {
        self.coeffs[p]
    }

    /// Real part, the `i_0` coefficient.
    pub fn re(&self) -> T {
        self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Embed into a higher level by zero-padding.
    pub fn lift(&self, level: u32) -> Result<Self> {
        check_level(level)?;
        if level < self.level {
            return Err(Error::LevelMismatch { left: self.level, right: level });
        }
        let mut coeffs: Coeffs<T> = SmallVec::from_elem(T::zero(), 1 << level);
        coeffs[..self.dim()].copy_from_slice(&self.coeffs);
        Ok(Self { level, coeffs })
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self { level: self.level, coeffs: self.coeffs.iter().map(|&c| f(c)).collect() }
    }

    pub fn scale(&self, t: T) -> Self {
        self.map(|c| c * t)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        same_level(self, other)?;
        Ok(Self {
            level: self.level,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Cayley-Dickson product `self * other`.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        same_level(self, other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let dim = self.dim();
        let table = generator_table(self.level);
        let mut out: Coeffs<T> = SmallVec::from_elem(T::zero(), dim);
        for (p, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let row = &table[p * dim..(p + 1) * dim];
            for (g, &b) in row.iter().zip(&other.coeffs) {
                if b.is_zero() {
                    continue;
                }
                let t = a * b;
                let slot = &mut out[g.result];
                *slot = if g.sign > 0 { *slot + t } else { *slot - t };
            }
        }
        Self { level: self.level, coeffs: out }
    }

    /// Conjugate by coefficient negation: keep `i_0`, negate the rest.
    pub fn conj(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        for c in coeffs.iter_mut().skip(1) {
            *c = -*c;
        }
        Self { level: self.level, coeffs }
    }

    /// Conjugate from the generator sum
    /// `z* = -(2^r - 2)^(-1) * sum_p (i_p z) i_p`, left product first.
    ///
    /// Only defined for `r >= 2`, where the prefactor is regular.
    pub fn conj_formula(&self) -> Result<Self> {
        if self.level < 2 {
            return Err(Error::ConjFormulaDomain(self.level));
        }
        let mut sum = Self::zero(self.level);
        for p in 0..self.dim() {
            let ip = Self::generator(self.level, p);
            let term = ip.mul_unchecked(self).mul_unchecked(&ip);
            sum = sum.zip_with(&term, |a, b| a + b).expect("same level");
        }
        let denom = T::from_count(self.dim() - 2);
        Ok(sum.map(|c| -c / denom))
    }

    /// `sum_p coeffs[p]^2`, equal to the real part of `a a*`.
    pub fn norm_sqr(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |acc, &c| acc + c * c)
    }

    /// Real inner product of the coefficient vectors.
    pub fn dot(&self, other: &Self) -> T {
        self.coeffs.iter().zip(&other.coeffs).fold(T::zero(), |acc, (&a, &b)| acc + a * b)
    }

    /// `a^(-1) = a* / |a|^2`.
    ///
    /// Exact for field scalars; for integer scalars only meaningful on units.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if n.is_zero() {
            return Err(Error::ZeroDivision);
        }
        Ok(self.conj().map(|c| c / n))
    }

    /// `(a b) c - a (b c)`.
    pub fn associator(a: &Self, b: &Self, c: &Self) -> Result<Self> {
        let left = a.try_mul(b)?.try_mul(c)?;
        let right = a.try_mul(&b.try_mul(c)?)?;
        left.try_sub(&right)
    }

    /// `a b - b a`.
    pub fn commutator(a: &Self, b: &Self) -> Result<Self> {
        a.try_mul(b)?.try_sub(&b.try_mul(a)?)
    }
}

impl<T: RealScalar> CdElement<T> {
    /// Euclidean norm `|a|`.
    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    /// Largest coefficient difference.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs()))
    }

    /// Euclidean distance between coefficient vectors.
    pub fn distance(&self, other: &Self) -> T {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b))
            .sqrt()
    }
}

pub(crate) fn check_level(level: u32) -> Result<()> {
    if level > MAX_LEVEL {
        Err(Error::UnsupportedLevel(level))
    } else {
        Ok(())
    }
}

fn same_level<T>(a: &CdElement<T>, b: &CdElement<T>) -> Result<()> {
    if a.level != b.level {
        Err(Error::LevelMismatch { left: a.level, right: b.level })
    } else {
        Ok(())
    }
}

impl<T: Scalar> Add for &CdElement<T> {
    type Output = CdElement<T>;

    /// # Panics
    /// On level mismatch; use [`CdElement::try_add`] to get an error instead.
    fn add(self, rhs: Self) -> CdElement<T> {
        self.try_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<T: Scalar> Sub for &CdElement<T> {
    type Output = CdElement<T>;

    fn sub(self, rhs: Self) -> CdElement<T> {
        self.try_sub(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<T: Scalar> Mul for &CdElement<T> {
    type Output = CdElement<T>;

    fn mul(self, rhs: Self) -> CdElement<T> {
        self.try_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<T: Scalar> Neg for &CdElement<T> {
    type Output = CdElement<T>;

    fn neg(self) -> CdElement<T> {
        self.map(|c| -c)
    }
}

impl<T: fmt::Debug> fmt::Debug for CdElement<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A{}{:?}", self.level, self.coeffs.as_slice())
    }
}

impl<T: fmt::Display> fmt::Display for CdElement<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (p, c) in self.coeffs.iter().enumerate() {
            if p > 0 {
                write!(f, " ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    type E = CdElement<i64>;

    /// Independent product: the doubling rule applied recursively to full
    /// coefficient vectors, never touching the generator table.
    fn oracle_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
        let n = a.len();
        if n == 1 {
            return vec![a[0] * b[0]];
        }
        let h = n / 2;
        let conj = |x: &[i64]| -> Vec<i64> {
            x.iter().enumerate().map(|(i, &c)| if i == 0 { c } else { -c }).collect()
        };
        let (a0, a1) = a.split_at(h);
        let (b0, b1) = b.split_at(h);
        let ac = oracle_mul(a0, b0);
        let db = oracle_mul(&conj(b1), a1);
        let da = oracle_mul(b1, a0);
        let bc = oracle_mul(a1, &conj(b0));
        let mut out: Vec<i64> = ac.iter().zip(&db).map(|(x, y)| x - y).collect();
        out.extend(da.iter().zip(&bc).map(|(x, y)| x + y));
        out
    }

    #[test]
    fn tables_match_recursive_doubling_oracle() {
        for level in 0..=5u32 {
            let dim = 1usize << level;
            for p in 0..dim {
                for q in 0..dim {
                    let a = E::generator(level, p);
                    let b = E::generator(level, q);
                    let got = &a * &b;
                    let want = oracle_mul(a.coeffs(), b.coeffs());
                    assert_eq!(got.coeffs(), want.as_slice(), "r={level} i{p} i{q}");
                }
            }
        }
    }

    #[test]
    fn generic_products_match_oracle_on_integer_elements() {
        let a = E::new(3, [1, -2, 0, 3, 1, 0, -1, 2]).unwrap();
        let b = E::new(3, [0, 1, 1, -1, 2, 3, 0, -2]).unwrap();
        assert_eq!((&a * &b).coeffs(), oracle_mul(a.coeffs(), b.coeffs()).as_slice());
    }

    #[test]
    fn minus_one_squares() {
        for level in 1..=5 {
            let i1 = E::generator(level, 1);
            assert_eq!(&i1 * &i1, E::real(level, -1));
        }
    }

    #[test]
    fn quaternion_i1_i2_is_i3() {
        assert_eq!(&E::generator(2, 1) * &E::generator(2, 2), E::generator(2, 3));
    }

    #[test]
    fn octonion_generators_do_not_associate() {
        let (i1, i2, i4) = (E::generator(3, 1), E::generator(3, 2), E::generator(3, 4));
        assert_ne!(&(&i1 * &i2) * &i4, &i1 * &(&i2 * &i4));
    }

    #[test]
    fn level_mismatch_rejected() {
        let a = E::one(2);
        let b = E::one(3);
        assert_eq!(a.try_mul(&b), Err(Error::LevelMismatch { left: 2, right: 3 }));
        assert_eq!(a.lift(3).unwrap().try_mul(&b).unwrap(), b);
    }

    #[test]
    fn coefficient_count_checked() {
        assert!(matches!(E::new(2, [1, 2, 3]), Err(Error::CoefficientCount { .. })));
        assert!(matches!(E::new(7, [0; 128]), Err(Error::UnsupportedLevel(7))));
    }

    #[test]
    fn conjugation_by_negation() {
        let a = E::new(2, [2, 3, -1, 0]).unwrap();
        assert_eq!(a.conj(), E::new(2, [2, -3, 1, 0]).unwrap());
        assert_eq!(E::one(2).conj(), E::one(2));
        assert_eq!(E::generator(2, 1).conj(), -&E::generator(2, 1));
        assert_eq!(a.conj().conj(), a);
    }

    #[test]
    fn conjugation_formula_exact_on_integers() {
        assert_eq!(E::one(2).conj_formula().unwrap(), E::one(2));
        assert_eq!(E::generator(2, 1).conj_formula().unwrap(), -&E::generator(2, 1));
        // every generator at r = 2..=5
        for level in 2..=5 {
            for p in 0..(1usize << level) {
                let g = E::generator(level, p);
                assert_eq!(g.conj_formula().unwrap(), g.conj(), "r={level} p={p}");
            }
        }
    }

    #[test]
    fn conjugation_formula_rejects_low_levels() {
        assert_eq!(E::one(0).conj_formula(), Err(Error::ConjFormulaDomain(0)));
        assert_eq!(E::one(1).conj_formula(), Err(Error::ConjFormulaDomain(1)));
    }

    #[test]
    fn norms() {
        let a = CdElement::<f64>::new(1, [3.0, 4.0]).unwrap();
        assert_eq!(a.norm(), 5.0);
        for p in 0..16 {
            assert_eq!(CdElement::<f64>::generator(4, p).norm(), 1.0);
        }
    }

    #[test]
    fn exact_rational_inverse() {
        type Q = CdElement<Ratio<i64>>;
        let r = |n| Ratio::from_integer(n);
        let a = Q::new(2, [r(1), r(1), r(0), r(0)]).unwrap();
        let inv = a.inverse().unwrap();
        let half = Ratio::new(1, 2);
        assert_eq!(inv, Q::new(2, [half, -half, r(0), r(0)]).unwrap());
        assert_eq!(&a * &inv, Q::one(2));
        assert_eq!(&inv * &a, Q::one(2));
        assert_eq!(Q::one(2).inverse().unwrap(), Q::one(2));
        assert_eq!(Q::generator(2, 1).inverse().unwrap(), -&Q::generator(2, 1));
    }

    #[test]
    fn inverse_of_zero_is_distinct_error() {
        assert_eq!(CdElement::<f64>::zero(3).inverse(), Err(Error::ZeroDivision));
    }

    #[test]
    fn works_in_single_precision() {
        let a = CdElement::<f32>::new(2, [1.0, 2.0, 0.5, -1.0]).unwrap();
        let p = &a * &a.inverse().unwrap();
        assert!(p.max_abs_diff(&CdElement::one(2)) < 1e-6);
    }
}
