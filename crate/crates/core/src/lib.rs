//! Analytic phase retrieval by exponential filtering, and the polarization
//! weak-measurement experiments that share its mathematics.
//!
//! The crate is organised bottom-up:
//!
//! * [`wavefield`]: grids, the Fourier convention, analytic continuation.
//! * [`zeros`]: Hadamard products and zero-based models of the spectrum.
//! * [`expfilter`]: the two-intensity phase-retrieval pipeline.
//! * [`polarization`]: Jones states, Pauli operators and weak values.
//! * [`birefringence_sim`]: weak-value amplification with a birefringent crystal.
//! * [`direct_measure_sim`]: direct wavefunction measurement by sliver scanning.
//! * [`weakvalue_bridge`]: the exponential filter read as a weak measurement.
//!
//! [`presets`] and [`io`] provide test objects and file formats for the CLI.

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod birefringence_sim;
pub mod direct_measure_sim;
pub mod error;
pub mod expfilter;
pub mod fit;
pub mod io;
pub mod polarization;
pub mod presets;
pub mod wavefield;
pub mod weakvalue_bridge;
pub mod zeros;

pub use error::{Error, Result};
pub use expfilter::{FilterSpec, PhaseResult};
pub use num_complex::Complex64;
pub use polarization::{JonesState, PauliOp, PolarizedSpectrum};
pub use wavefield::{Grid, SampledField, Spectrum};
