//! Numerical toolkit for rearrangement-invariant norms on `[0, ∞)`.
//!
//! Functions enter only through their nonincreasing rearrangements
//! ([`funcs`]); norms are evaluated on the logarithmic axis ([`quad`]).
//! [`lorentz`], [`orlicz`] and [`norm`] provide the norm families,
//! [`homogeneity`] the dilation experiments, and [`repro`] the three
//! counterexample scenarios.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod corpus;
pub mod error;
pub mod funcs;
pub mod homogeneity;
pub mod lorentz;
pub mod norm;
pub mod orlicz;
pub mod par;
pub mod quad;
pub mod repro;

pub use error::{Result, RikitError};
pub use funcs::{AnalyticDecreasing, RearrangedFunction, StepDecreasing, StepFunction};
pub use norm::{NormFunctional, NormKind};
pub use par::Execution;
pub use quad::{IntegralResult, QuadratureSpec, Status};
