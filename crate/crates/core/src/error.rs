//! Error types shared by the analytic and simulation modules.

use std::fmt;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes of queueing computations.
///
/// `Unstable` is deliberately distinct from `InvalidArgument`: a delay
/// queue offered `a >= m` erlangs has no steady state, and callers such
/// as the CLI map that condition to its own exit status.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument violated a documented precondition.
    InvalidArgument(String),
    /// A delay-model metric was requested at or past saturation, where
    /// the waiting line grows without bound.
    Unstable { m: u32, a: f64 },
    /// A computed quantity left its mathematical domain.
    Domain(String),
    /// Iterative root refinement missed its residual target.
    NoConvergence { degree: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::Unstable { m, a } => write!(f, "unstable: a >= m (a = {a}, m = {m})"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::NoConvergence { degree } => {
                write!(f, "root finding did not converge for degree {degree}")
            }
        }
    }
}

impl std::error::Error for Error {}
