//! Special functions behind every analytic formula in the crate.
//!
//! All routines are pure, generic over [`Real`](crate::Real), and reentrant.

mod erf;
mod gamma;
mod harmonics;
mod legendre;

pub use erf::{erf, erfc, ln_normal_pdf, normal_cdf, normal_pdf};
pub use gamma::{upper_incomplete_gamma, HalfInt};
pub use harmonics::{sph_harm_complex, sph_harm_real, PointHarmonics};
pub use legendre::{legendre_p, schmidt_legendre, schmidt_legendre_table};
