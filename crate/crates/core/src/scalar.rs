//! Coefficient types for Cayley-Dickson arithmetic.

use std::fmt::Debug;
use std::ops::Neg;

use num_traits::Num;

/// Ring-like coefficient type for Cayley-Dickson elements.
///
/// Everything that only needs `+`, `-`, `*` and exact division (products,
/// conjugation, Hermitian products, inverses over a field) is generic over
/// this trait, so the same code runs on `i64` for exact generator-table
/// checks, `Ratio<i64>` for exact inverses, and `f32`/`f64` for numerics.
pub trait Scalar: Copy + Debug + PartialEq + Num + Neg<Output = Self> + Send + Sync + 'static {
    /// `n` as a scalar, built from repeated addition of one.
    fn from_count(n: usize) -> Self {
        let mut acc = Self::zero();
        for _ in 0..n {
            acc = acc + Self::one();
        }
        acc
    }
}

impl<T> Scalar for T where T: Copy + Debug + PartialEq + Num + Neg<Output = T> + Send + Sync + 'static {}

/// Scalars with a square root, needed for norms and normalization.
pub trait RealScalar: Scalar + num_traits::Float {}

impl<T> RealScalar for T where T: Scalar + num_traits::Float {}
