//! Time-resolved single-photon state tomography under detector jitter.
//!
//! The crate simulates a polarization qubit (or a polarization-entangled
//! pair) measured by a single fixed projector whose effective orientation
//! sweeps the Bloch sphere through unitary fiber dynamics. Photon arrival
//! times are recorded by a detector with Gaussian timing jitter; counts carry
//! Poisson noise; states are reconstructed by maximum likelihood over a
//! Cholesky parametrization and scored by fidelity, trace distance and
//! concurrence.
//!
//! Module map:
//!
//! * [`linalg`], [`density`]: complex matrices, Hermitian eigensystems,
//!   physical density matrices
//! * [`dynamics`]: the time-dependent unitary
//! * [`measurement`]: Heisenberg-picture and jitter-smeared operators
//! * [`states`]: input ensembles and the Cholesky parametrization
//! * [`counts`]: the forward (detector) model
//! * [`estimator`], [`optimize`]: maximum-likelihood reconstruction
//! * [`metrics`]: fidelity, trace distance, concurrence, aggregation
//! * [`harness`]: configuration, sweeps and CSV output

pub mod counts;
pub mod density;
pub mod dynamics;
pub mod error;
pub mod estimator;
pub mod harness;
pub mod linalg;
pub mod measurement;
pub mod metrics;
pub mod optimize;
pub mod states;

pub use counts::{CountRecord, NoiseConfig};
pub use density::DensityMatrix;
pub use dynamics::{DynamicsParams, UnitaryMatrix};
pub use error::{Error, Result};
pub use estimator::{EstimateResult, EstimatorConfig, Optimizer};
pub use linalg::{ComplexMatrix, C64};
pub use measurement::{JitterModel, MeasurementOperator, MeasurementSchedule, Polarization};
pub use metrics::MetricsSummary;
pub use states::{BellParams, BlochParams, CholeskyParams};
