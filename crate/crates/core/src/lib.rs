//! Finite-dimensional consistent-histories toolkit.
//!
//! Represents families of quantum histories built from resolutions of the
//! identity and decides which consistency notions they satisfy with respect
//! to a density operator: weak and medium decoherence, linear positivity,
//! ordered consistency, the probability sum rule, and self-decoherence
//! through mirror projections.

pub mod consistency;
pub mod error;
pub mod histories;
pub mod individuality;
pub mod io;
pub mod matcore;
pub mod mirror;
pub mod sampling;
pub mod scenarios;

pub use error::{Error, Result};
pub use matcore::{
    CMatrix, CVector, DensityOperator, Projection, SquareComplexMatrix, ToleranceConfig,
};
