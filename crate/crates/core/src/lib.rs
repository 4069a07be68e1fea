//! ℓ¹ regularization (soft thresholding) of Gaussian isotropic random fields
//! on the sphere, the closed-form moments of the regularized coefficients and
//! fields, and Monte Carlo estimators to check them.
//!
//! The numerical kernels are generic over [`Real`] (`f32` or `f64`). The
//! Monte Carlo and verification layers work in `f64`.

// `!(x > 0)` is how validation rejects NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod moments;
pub mod montecarlo;
pub mod regularize;
pub mod sampling;
mod scalar;
pub mod specfun;
pub mod spectrum;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Real;

pub use moments::{MomentReport, NuRatio, RegularizedMultipole};
pub use montecarlo::{McConfig, McEstimate};
pub use regularize::{Penalty, Scheme};
pub use sampling::{Basis, HarmonicCoefficients, RngSeed};
pub use spectrum::{PowerSpectrum, SpectrumRow};

pub type PowerSpectrum64 = PowerSpectrum<f64>;
pub type PowerSpectrum32 = PowerSpectrum<f32>;
pub type HarmonicCoefficients64 = HarmonicCoefficients<f64>;
pub type HarmonicCoefficients32 = HarmonicCoefficients<f32>;
pub type Penalty64 = Penalty<f64>;
pub type Penalty32 = Penalty<f32>;
pub type NuRatio64 = NuRatio<f64>;
pub type NuRatio32 = NuRatio<f32>;
pub type MomentReport64 = MomentReport<f64>;
pub type MomentReport32 = MomentReport<f32>;
pub type RegularizedMultipole64 = RegularizedMultipole<f64>;
pub type RegularizedMultipole32 = RegularizedMultipole<f32>;
