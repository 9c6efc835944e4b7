//! Gaussian test-function regularization of one-loop amplitudes.
//!
//! Fields are smeared with Hermite-Gaussian test functions; the smearing
//! turns loop integrands into rapidly decaying functions of the loop momentum
//! and the amplitudes come out finite. The crate covers the test functions
//! themselves, the regularized propagator, the one-loop tadpole, anomaly,
//! self-energy and vertex, and the Taylor-Lagrange extension used to keep the
//! `ln Λ²` structure of logarithmically divergent kernels.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod error;
pub mod loops;
pub mod propagator;
pub mod quad;
pub mod testfn;
pub mod tlr;

pub use error::{Error, Result};
pub use loops::{CouplingParams, TadpoleParams};
pub use num_complex::Complex64;
pub use propagator::PropagatorParams;
pub use quad::{Decay, QuadratureConfig, QuadratureResult, Scheme};
pub use testfn::{DispersionTensors, FourMomentum, TestFunctionParams};
pub use tlr::{PartitionOfUnity, TlrConfig};
