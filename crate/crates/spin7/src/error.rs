use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("singular frame: {0}")]
    SingularFrame(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singular trajectory: {0}")]
    SingularTrajectory(String),
    #[error("harmonic form is not L2-normalisable: {0}")]
    NotNormalisable(String),
    #[error("convention mismatch: {0}")]
    Convention(String),
    #[error("no root: {0}")]
    NoRoot(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("degenerate 4-plane")]
    DegeneratePlane,
}

pub type Result<T> = std::result::Result<T, Error>;
