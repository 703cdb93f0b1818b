use thiserror::Error;

/// Errors raised by the estimation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("rotation angle {angle} rad is within {tol} of pi; logarithm axis is ambiguous")]
    AngleNearPi { angle: f64, tol: f64 },
    #[error("matrix is not a rotation (orthogonality residual {residual:.3e}, det {det:.6})")]
    NotARotation { residual: f64, det: f64 },
    #[error("concentration is degenerate: pairwise singular value sum {sum:.3e} is not positive")]
    DegenerateConcentration { sum: f64 },
    #[error("matrix is not symmetric positive definite (smallest eigenvalue {min_eig:.3e})")]
    NotPositiveDefinite { min_eig: f64 },
    #[error("attitudes coincide; the connecting axis is undefined")]
    CoincidentAttitudes,
    #[error("mean attitude is off the subset by {offset:.3e} rad")]
    MeanNotInSubset { offset: f64 },
    #[error("attitude least-squares problem is not unique (s2 + s3 = {sum:.3e})")]
    NonUniqueSolution { sum: f64 },
    #[error("innovation covariance is singular")]
    SingularInnovation,
    #[error("belief and measurement use different error conventions")]
    SideMismatch,
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("invalid stability constants: {0}")]
    InvalidConstants(String),
    #[error("stability certificate violated at step {step}: {what}")]
    CertificateViolation { step: usize, what: String },
    #[error("configuration: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
