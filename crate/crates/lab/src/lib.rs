//! Experiment orchestration for the dimer laboratory: run configuration,
//! sweeps, reference curves, metrics and file outputs.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod metrics;
pub mod output;
pub mod records;
pub mod reference;
pub mod runner;

pub use config::RunConfig;
pub use error::{LabError, LabResult};
pub use records::SweepRecord;
pub use reference::ReferenceCurve;
pub use runner::{execute, Command, RunOutput};
