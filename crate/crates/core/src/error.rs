use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid step function: {0}")]
    InvalidFunction(String),

    #[error("invalid sequence: {0}")]
    InvalidSequence(String),

    #[error("parameter `{name}` = {value} is outside {expected}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("functions live on different domains")]
    DomainMismatch,

    #[error("divergent quantity: {0}")]
    Divergent(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("truncation bracket {width:e} exceeds tolerance {tol:e}")]
    Truncation { width: f64, tol: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_range(
    name: &'static str,
    value: f64,
    ok: bool,
    expected: &'static str,
) -> Result<()> {
    if ok && !value.is_nan() {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            expected,
        })
    }
}
