use thiserror::Error;

/// Errors raised by the structured-distance library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix `{name}` must be square, got {rows}x{cols}")]
    NotSquare {
        name: String,
        rows: usize,
        cols: usize,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix `{0}` contains NaN or infinite entries")]
    NonFinite(String),

    #[error("matrix `{name}` is not symmetric: relative asymmetry {asymmetry:.3e} exceeds {tolerance:.3e}")]
    NotSymmetric {
        name: String,
        asymmetry: f64,
        tolerance: f64,
    },

    #[error("matrix `{name}` is not skew-symmetric: relative symmetric part {defect:.3e} exceeds {tolerance:.3e}")]
    NotSkew {
        name: String,
        defect: f64,
        tolerance: f64,
    },

    #[error("matrix `{name}` is not positive semidefinite: smallest eigenvalue {lambda_min:.6e}")]
    NotPsd { name: String, lambda_min: f64 },

    #[error("vector must be nonzero and finite")]
    ZeroVector,

    #[error("invalid structure parameter: {0}")]
    InvalidParameter(String),

    #[error("kernel characterizations disagree (stacked {stacked}, squared {squared}, linear {linear}); borderline rank decision")]
    CharacterizationDisagreement {
        stacked: usize,
        squared: usize,
        linear: usize,
    },

    #[error("singularity tests disagree: {0}")]
    SingularityDisagreement(String),

    #[error("Q is numerically singular (smallest singular value {sigma_min:.3e}); use the singular-Q reduction")]
    SingularQ { sigma_min: f64 },

    #[error("index assumption violated: {0}")]
    IndexAssumption(String),

    #[error("inconsistent structure: {0}")]
    InconsistentStructure(String),

    #[error("optimizer inconsistency: {0}")]
    OptimizerInconsistency(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    #[error("invalid problem file: {0}")]
    InvalidProblem(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True when the error means the input is outside the structure class
    /// (as opposed to a numerical or internal failure).
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::NotSquare { .. }
                | Error::DimensionMismatch(_)
                | Error::NonFinite(_)
                | Error::NotSymmetric { .. }
                | Error::NotSkew { .. }
                | Error::NotPsd { .. }
                | Error::ZeroVector
                | Error::InvalidParameter(_)
                | Error::InvalidProblem(_)
                | Error::UnknownFixture(_)
                | Error::InconsistentStructure(_)
                | Error::SingularQ { .. }
                | Error::IndexAssumption(_)
                | Error::Json(_)
        )
    }

    /// True for borderline rank decisions.
    pub fn is_ambiguity(&self) -> bool {
        matches!(
            self,
            Error::CharacterizationDisagreement { .. } | Error::SingularityDisagreement(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
