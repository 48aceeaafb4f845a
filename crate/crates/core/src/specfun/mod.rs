//! Special functions behind every basis function: cylinder and spherical
//! Bessel functions of the first kind, their positive zeros, and spherical
//! harmonics with the Condon–Shortley phase.

mod bessel;
mod harmonics;
mod spherical;
mod zeros;

pub use bessel::{bessel_j, bessel_j_derivative, MAX_CYLINDER_ORDER};
pub use harmonics::{spherical_harmonic, spherical_harmonic_dtheta, MAX_HARMONIC_DEGREE};
pub use spherical::{spherical_bessel_j, spherical_bessel_j_derivative, MAX_SPHERICAL_ORDER};
pub use zeros::{bessel_zero, bessel_zeros, mcmahon_guess, BesselKind, BesselZeroTable};

pub(crate) use bessel::{jn, jn_with_derivative};
pub(crate) use harmonics::theta_factor;
pub(crate) use spherical::{sph_jn, sph_jn_with_derivative};
