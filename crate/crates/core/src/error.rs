use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mode dimensions ({dim_a}, {dim_b}): {reason}")]
    InvalidDims {
        dim_a: usize,
        dim_b: usize,
        reason: &'static str,
    },

    #[error("Fock level |{n},{m}⟩ outside basis of dims ({dim_a}, {dim_b})")]
    OutOfRange {
        n: usize,
        m: usize,
        dim_a: usize,
        dim_b: usize,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("dims ({dim_a}, {dim_b}) too small: {needed}")]
    DimsTooSmall {
        dim_a: usize,
        dim_b: usize,
        needed: &'static str,
    },

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("operator is not Hermitian (max |A - A†| = {deviation:e}, tolerance {tolerance:e})")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("matrix is not positive semidefinite (eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("projected state has negligible weight in the {{0,2}}x{{0,2}} subspace ({weight:e} <= {threshold:e})")]
    NearZeroSupport { weight: f64, threshold: f64 },

    #[error("invalid coupler parameters: {0}")]
    InvalidParams(String),

    #[error("analytic solution requires real, non-negative alpha and epsilon (got alpha = {alpha}, epsilon = {epsilon})")]
    NonRealAnalyticParams { alpha: String, epsilon: String },

    #[error("alpha = epsilon = 0: effective frequency vanishes")]
    DegenerateParams,

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("step size underflow at t = {t:e} (h = {h:e}): error estimate still exceeds tolerance")]
    StepSizeTooLarge { t: f64, h: f64 },

    #[error("Liouvillian eigendecomposition failed: {0}")]
    EigendecompositionFailed(String),

    #[error("invalid time series: {0}")]
    InvalidSeries(String),

    #[error("linear algebra backend: {0}")]
    Linalg(#[from] ndarray_linalg::error::LinalgError),
}
