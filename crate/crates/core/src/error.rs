use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("breakpoints must be finite, positive and strictly increasing (index {index})")]
    BadBreakpoints { index: usize },
    #[error("step values must be finite and nonnegative, got {value} at index {index}")]
    BadValue { index: usize, value: f64 },
    #[error("{name} must satisfy {constraint}, got {value}")]
    Domain {
        name: &'static str,
        constraint: &'static str,
        value: f64,
    },
    #[error("exponent window violated: need {0}")]
    Window(String),
    #[error("operation undefined for the zero function")]
    ZeroFunction,
    #[error("malformed partition: {0}")]
    Partition(String),
    #[error("matrix error: {0}")]
    Matrix(String),
    #[error("cannot parse `{token}`: {reason}")]
    Parse { token: String, reason: String },
    #[error("{0}")]
    Contract(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check(ok: bool, name: &'static str, constraint: &'static str, value: f64) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            constraint,
            value,
        })
    }
}
