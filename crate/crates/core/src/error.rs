use alloc::string::String;
use core::fmt;

/// Failure modes surfaced by the lattice routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A precondition on parameters or arguments was violated.
    InvalidParams(String),
    /// γ is at or beyond the critical value γ_{p,q}; the on-site function has
    /// no pair of competing nonzero roots there.
    NoCompetingRoots { gamma: f64, gamma_crit: f64 },
    /// Newton iteration exhausted its budget without meeting the tolerance.
    NoConvergence { iterations: usize, residual: f64 },
    /// A solved profile no longer carries the sign pattern of its code.
    SignPatternBroken,
    /// Boundary amplitudes stayed above tolerance after the allowed number of
    /// window enlargements.
    WindowTooSmall,
    /// L⁺ is numerically singular, so Krein quantities are undefined.
    SingularLplus,
    /// The requested analytic prediction does not cover this code family.
    NotApplicable(&'static str),
    /// The first point of a branch continuation could not be solved.
    InitialSolveFailed(String),
    /// No exponential growth window was found in a deviation series.
    NotGrowing,
    /// An eigensolver or linear solve failed.
    Numerical(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParams(msg) => write!(f, "invalid parameters: {msg}"),
            Error::NoCompetingRoots { gamma, gamma_crit } => write!(
                f,
                "no competing roots: gamma = {gamma} is not below gamma_crit = {gamma_crit}"
            ),
            Error::NoConvergence { iterations, residual } => write!(
                f,
                "Newton did not converge after {iterations} iterations (residual {residual:e})"
            ),
            Error::SignPatternBroken => write!(f, "solved profile broke the code's sign pattern"),
            Error::WindowTooSmall => {
                write!(f, "lattice window too small after maximum enlargements")
            }
            Error::SingularLplus => write!(f, "L+ operator is singular"),
            Error::NotApplicable(what) => write!(f, "not applicable: {what}"),
            Error::InitialSolveFailed(msg) => write!(f, "initial branch solve failed: {msg}"),
            Error::NotGrowing => write!(f, "deviation series has no exponential growth window"),
            Error::Numerical(msg) => write!(f, "numerical failure: {msg}"),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
