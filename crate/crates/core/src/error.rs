use thiserror::Error;

/// Errors produced by the analytical and simulation layers.
#[derive(Error, Debug, Clone)]
pub enum Error {
    /// Adaptive quadrature (or a tail extension) failed to reach the requested
    /// tolerance. The best estimate and its error bound are carried along so a
    /// caller can decide whether the partial result is still usable.
    #[error("quadrature did not converge: estimate {estimate}, error bound {error_bound}")]
    ConvergenceFailure { estimate: f64, error_bound: f64 },

    /// Root bracketing failed: f has the same sign at both endpoints.
    #[error("no sign change in bracket [{lo}, {hi}]: f(lo)={f_lo}, f(hi)={f_hi}")]
    BracketError {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration or scenario field violates an invariant.
    #[error("invalid value for `{field}`: {message}")]
    Validation { field: String, message: String },

    /// A text input (line catalog, scenario file) could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn validation(field: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
