//! Holomorphic maps in phrase form: evaluation, Leibniz derivatives,
//! finite-difference validation, and a prefix text form.
//!
//! A map counts as holomorphic here when it is given as a phrase in the
//! variable (conjugation included, since `z*` has a generator-sum form), and
//! its derivative is checked numerically against central differences.

mod derivative;
mod jacobian;
mod phrase;
pub mod text;

pub use derivative::{check_derivative_fd, check_derivative_fd_scaled, doubled, eval_derivative};
pub use jacobian::{derivative_jacobian, phrase_jacobian, real_jacobian};
pub use phrase::{Phrase, PhraseMap};

/// Default central-difference step.
pub const DEFAULT_STEP: f64 = 1e-5;
