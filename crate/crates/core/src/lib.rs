//! Exact states, quantum effective forces and Bohmian trajectories for a
//! particle (or a pair of identical particles) confined in a circular,
//! cylindrical or spherical infinite well whose wall moves uniformly,
//! `L(t) = a + u t`.
//!
//! Everything is expressed in the unit system `ħ = μ = 1`; the initial radius
//! `a` is a free parameter but all shipped scenarios use `a = 1`. The wall is
//! described by the dimensionless parameter `α = μ a u / 2ħ`, usually quoted
//! as a multiple of a mode reference `α_ref = x/2` where `x` is the mode's
//! Bessel zero.
//!
//! The crate is `no_std` (with `alloc`). The `parallel` feature pulls in
//! `std` and runs trajectory ensembles on a rayon pool.
//!
//! Module map:
//!
//! * [`specfun`]: Bessel and spherical Bessel functions, their zeros, and
//!   spherical harmonics.
//! * [`trapstate`]: trap geometry, modes, the exact time-dependent basis and
//!   truncated superpositions.
//! * [`expansion`]: overlap of an initial eigenstate (possibly of a smaller
//!   box) with the moving-wall basis.
//! * [`force`]: the effective force `d⟨p⟩/dt` by closed-form mode sums,
//!   boundary quadrature and the quantum-potential volume integral.
//! * [`bohm`]: single-particle guidance, trajectory integration and
//!   Born-distributed ensembles.
//! * [`twobody`]: two particles in the sphere under MB, FD and BE statistics.
//! * [`oracle`]: an independent Crank–Nicolson propagator on the co-moving
//!   coordinate used to validate the spectral machinery.
#![cfg_attr(not(any(feature = "std", test)), no_std)]
// guards written as `!(x > 0.0)` reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
pub(crate) mod math;

pub mod bohm;
pub mod expansion;
pub mod force;
pub mod ode;
pub mod oracle;
pub mod quad;
pub mod specfun;
pub mod trapstate;
pub mod twobody;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use bohm::{Trajectory, TrajectoryOptions};
pub use expansion::OverlapRow;
pub use force::{Direction, ForceMethod, ForceSample, Frame};
pub use specfun::{BesselKind, BesselZeroTable};
pub use trapstate::{Gradient, Mode, ModeIndex, Point, TrapGeometry, TrapKind, WaveState};
pub use twobody::{Statistics, TwoBodyState};
