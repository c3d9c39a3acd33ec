use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("gram matrix is not positive semidefinite (most negative eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("{what} failed: residual {residual:e} exceeds tolerance {tol:e}")]
    Check { what: String, residual: f64, tol: f64 },
}

impl Error {
    pub(crate) fn check(what: impl Into<String>, residual: f64, tol: f64) -> Self {
        Error::Check { what: what.into(), residual, tol }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
