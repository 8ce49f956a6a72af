use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Mesh bounds or cell counts that do not describe a rectangle.
    InvalidMesh(&'static str),
    /// Two arrays that must agree in length do not.
    DimensionMismatch { expected: usize, found: usize },
    /// A coefficient or data value is NaN or infinite.
    NonFinite(&'static str),
    /// A parameter violates its admissible range.
    InvalidParameter(&'static str),
    /// Conjugate gradients hit the iteration cap.
    NotConverged { iterations: usize, residual: f64 },
    /// The time stepper produced a frame with norm above the blowup limit.
    Blowup { step: usize, norm: f64 },
    /// A control value left [0, 1] by more than the admissible slack.
    Infeasible { index: usize, value: f64 },
    /// Bisection for the trust-region multiplier did not bracket the radius.
    ProjectionFailed,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidMesh(msg) => write!(f, "invalid mesh: {msg}"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NonFinite(what) => write!(f, "non-finite value in {what}"),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::NotConverged { iterations, residual } => write!(
                f,
                "linear solver did not converge after {iterations} iterations (relative residual {residual:e})"
            ),
            Error::Blowup { step, norm } => {
                write!(f, "time stepping blew up at step {step} (frame norm {norm:e})")
            }
            Error::Infeasible { index, value } => {
                write!(f, "control value {value} at node {index} outside [0, 1]")
            }
            Error::ProjectionFailed => write!(f, "box/ball projection bisection failed"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
