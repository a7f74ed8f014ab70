use thiserror::Error;

use crate::model::Bath;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error(
        "reservoir {bath} unit state is not positive: coherence amplitude {amplitude:.3e} \
         exceeds the admissible maximum {max_amplitude:.3e}"
    )]
    UnitStateNotPositive {
        bath: Bath,
        amplitude: f64,
        max_amplitude: f64,
    },

    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("system is singular after imposing the normalization constraint")]
    SingularConstraint,

    #[error("kernel has dimension {dimension}; the dynamics is not connected")]
    DegenerateKernel { dimension: usize },

    #[error("steady state has eigenvalue {eigenvalue:.3e} below the roundoff floor")]
    NegativeSteadyState { eigenvalue: f64 },

    #[error("state is not stationary: generator residual {residual:.3e}")]
    NotSteady { residual: f64 },

    #[error("integration drifted ({what} drift {drift:.3e}); use a smaller time step")]
    IntegrationDrift { what: &'static str, drift: f64 },

    #[error("collision step {tau:.3e} is outside the linear regime (halving ratio {ratio:.3})")]
    NonlinearStep { tau: f64, ratio: f64 },

    #[error("regime mismatch: {0}")]
    RegimeMismatch(String),

    #[error("no in-regime points to optimise over")]
    EmptyCurve,

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Configuration or parameter problems, as opposed to numerical failures.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::UnitStateNotPositive { .. }
                | Error::InvalidSweep(_)
                | Error::InvalidState(_)
        )
    }
}
