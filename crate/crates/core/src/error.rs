use alloc::boxed::Box;
use alloc::string::String;

use crate::bohm::Trajectory;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("order {order} exceeds the supported cap {cap}")]
    UnsupportedOrder { order: u32, cap: u32 },

    #[error("invalid quantum numbers: {0}")]
    InvalidQuantumNumber(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point with radial coordinate {radius} lies outside the box (wall at {wall}, t = {t})")]
    OutOfDomain { radius: f64, wall: f64, t: f64 },

    #[error("geometry mismatch: operation needs {expected}, state is {found}")]
    GeometryMismatch { expected: &'static str, found: &'static str },

    #[error("quadrature did not converge: estimate {estimate:e} with error {error:e} (requested {requested:e})")]
    Accuracy { estimate: f64, error: f64, requested: f64 },

    #[error("truncation at {n_max} modes leaves a norm defect {defect:e} above tolerance {tolerance:e}; increase n_max")]
    Truncation { defect: f64, tolerance: f64, n_max: usize },

    #[error("wavefunction amplitude {amplitude:e} is below the node threshold {threshold:e}")]
    NodeProximity { amplitude: f64, threshold: f64 },

    #[error("value has an imaginary residue {imag:e} against magnitude {real:e}")]
    ImaginaryResidue { real: f64, imag: f64 },

    #[error("trajectory stalled at t = {t} (step size collapsed to {step:e})")]
    TrajectoryStalled { t: f64, step: f64, partial: Box<Trajectory> },

    #[error("forbidden configuration: {0}")]
    ForbiddenConfiguration(String),

    #[error("sampler failure: {0}")]
    Sampler(String),

    #[error("grid resolution too coarse: norm drift {drift:e} per unit time")]
    Resolution { drift: f64 },
}

impl Error {
    /// True for failures of a numerical method to reach its accuracy target,
    /// as opposed to invalid input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Accuracy { .. }
                | Error::Truncation { .. }
                | Error::NodeProximity { .. }
                | Error::ImaginaryResidue { .. }
                | Error::TrajectoryStalled { .. }
                | Error::Sampler(_)
                | Error::Resolution { .. }
        )
    }
}
