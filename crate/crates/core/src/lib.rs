//! Beta-expansions in one and two dimensions.
//!
//! Exact and interval arithmetic for real bases `beta > 1`, Parry
//! admissibility and word counting, cylinders, zero-run exponents, a
//! two-dimensional Cantor construction with its mass distribution, and
//! closed-form Hausdorff-dimension evaluators.

pub mod beta;
pub mod cantor;
pub mod cli;
pub mod cylinders;
pub mod dimension;
pub mod error;
pub mod estimation;
pub mod exponents;
pub mod precision;
pub mod symbolic;

pub use error::{Error, Result};
