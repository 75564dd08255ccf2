//! Cayley-Dickson algebras, holomorphic manifolds over them, and a
//! constructive Whitney reduction: embed a compact manifold through its
//! charts into a product of spheres, then lower the ambient dimension by
//! generic projections while checking rank and injectivity on samples.

pub mod algebra;
pub mod embedding;
pub mod error;
pub mod holomorphy;
pub mod linalg;
pub mod linear;
pub mod manifold;
pub mod projective;
pub mod sampling;
pub mod scalar;

pub use algebra::CdElement;
pub use error::{Error, Result};
pub use linear::CdVector;
pub use scalar::{RealScalar, Scalar};

/// Double-precision element, the numeric workhorse.
pub type Element = CdElement<f64>;
/// Double-precision vector in `A_r^n`.
pub type Vector = CdVector<f64>;
/// Exact integer element for generator-table checks.
pub type ExactElement = CdElement<i64>;
/// Exact rational element.
pub type RationalElement = CdElement<num_rational::Ratio<i64>>;
pub type ExactVector = CdVector<i64>;
