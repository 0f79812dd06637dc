use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mode {mode} out of range for a {n_modes}-mode state")]
    ModeOutOfRange { mode: usize, n_modes: usize },

    #[error("a two-mode operation needs two distinct modes, got ({0}, {0})")]
    DuplicateModes(usize),

    #[error("beam splitter amplitudes are not unitary: tau^2 + rho^2 = {norm}")]
    NonUnitaryBeamSplitter { norm: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("covariance matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("uncertainty principle violated: smallest symplectic eigenvalue {0} < 1/2")]
    UncertaintyViolation(f64),

    #[error("matrix is not symplectic (max deviation {0:e})")]
    NotSymplectic(f64),

    #[error("covariance matrix is singular")]
    SingularCovariance,

    #[error("variances ({v_min}, {v_max}) describe a thermal state, not a squeezed one")]
    ThermalNotSqueezed { v_min: f64, v_max: f64 },

    #[error("operation produced the zero vector (success probability 0)")]
    ZeroState,

    #[error("reduced state of mode {0} is entangled with the remaining modes")]
    EntangledResidual(usize),

    #[error("states have different mode counts ({0} vs {1})")]
    ModeCountMismatch(usize, usize),

    #[error("state or mode function is not normalized (norm {0})")]
    Unnormalized(f64),

    #[error("insufficient phase coverage: {0}")]
    InsufficientPhases(String),

    #[error("trace too short: {0}")]
    TraceTooShort(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
