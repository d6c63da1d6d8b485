//! Adaptive optimal hard thresholding of singular values.
//!
//! Given the singular values of a noisy low-rank matrix and an upper bound `k`
//! on the signal rank, [`screenot`] estimates the noise spectrum and returns
//! the hard threshold that minimizes asymptotic Frobenius loss for that noise.

pub mod asymptotics;
pub mod error;
pub mod experiments;
pub mod io;
pub mod matrix;
pub mod noise;
pub mod pipeline;
pub mod pseudo_noise;
pub mod spectral;

pub use error::{Error, Result};
pub use matrix::{svd, DenseMatrix, DenoiseReport, SvdTriple};
pub use pipeline::{screenot, screenot_values, ScreenotParams, ThresholdResult};
pub use pseudo_noise::{SingularSpectrum, Strategy};
pub use spectral::{optimal_threshold, AtomicCdf, ShapeRatio};
