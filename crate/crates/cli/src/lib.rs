//! Command-line front end: JSON specs in, deterministic JSON and CSV out.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod app;
pub mod emit;
pub mod error;
pub mod spec;

pub use error::{CliError, CliResult};
pub use spec::{
    parse_function_spec, parse_norm_spec, FunctionSpec, NamedFunction, NormSpec, WeightSpec,
    YoungSpec,
};
