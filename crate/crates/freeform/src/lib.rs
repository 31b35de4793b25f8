//! Verification driver: shape definitions, seeded families, suites,
//! reports and the `freeform` command line.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub use freeform_core as core;

pub mod cli;
pub mod describe;
pub mod error;
pub mod family;
pub mod report;
pub mod shape;
pub mod suite;
pub mod sweep;

pub use error::{RunError, RunResult};
