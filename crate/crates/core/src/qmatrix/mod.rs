//! Complex linear algebra for one- and two-qubit operators.

mod cmatrix;
mod density;
mod eigen;

pub use cmatrix::CMatrix;
pub use density::{
    default_tolerance, ground_fidelity, state_fidelity, trace_distance, von_neumann_entropy, DensityMatrix,
};
#[allow(unused_imports)]
pub(crate) use density::entropy_of_spectrum;
pub use eigen::{hermitian_eigen, psd_sqrt, EigenSystem};
pub(crate) use eigen::jacobi;
