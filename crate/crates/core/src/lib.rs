//! Simulation kernel for a two-qubit spin-dimer quantum battery.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases at the crate root fix it to double precision.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod error;
mod scalar;

pub mod circuit;
pub mod extraction;
pub mod optim;
pub mod oracle;
pub mod qmatrix;
pub mod random;
pub mod seeding;
pub mod vqt;

pub use error::{Error, Result};
pub use scalar::Real;

pub use circuit::{Circuit, Gate, GateKind, NoiseModel};
pub use extraction::{ExtractionMode, ExtractionReportRow};
pub use optim::{Method, OptimOptions, OptimResult};
pub use oracle::{DimerParams, ThermalPoint, T_MIN};
pub use qmatrix::{CMatrix, DensityMatrix, EigenSystem};
pub use vqt::{AnsatzConfig, LatentModel, VqtConfig, VqtParams, VqtResult};

pub type CMatrix64 = CMatrix<f64>;
pub type DensityMatrix64 = DensityMatrix<f64>;
pub type DimerParams64 = DimerParams<f64>;
pub type ThermalPoint64 = ThermalPoint<f64>;
pub type Gate64 = Gate<f64>;
pub type Circuit64 = Circuit<f64>;
pub type VqtParams64 = VqtParams<f64>;
pub type VqtResult64 = VqtResult<f64>;
pub type ExtractionReportRow64 = ExtractionReportRow<f64>;
