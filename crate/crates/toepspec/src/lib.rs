//! Experiment harness, file formats and validation suite on top of
//! `toepspec-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod formats;
pub mod harness;
pub mod svg;
pub mod validate;

pub use config::{Experiment, ExperimentConfig};
pub use error::{AppError, AppResult};
