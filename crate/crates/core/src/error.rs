use thiserror::Error;

/// Errors raised by the engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("0 is not a point of C*/<tau>")]
    ZeroPoint,
    #[error("multiplicative period must satisfy |tau| > 1 (got |tau| = {0})")]
    InvalidPeriod(f64),
    #[error("points belong to different curves")]
    CurveMismatch,
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),
    #[error("series did not reach eps = {eps:e} within {cap} terms")]
    SeriesCap { eps: f64, cap: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("intersection form is not positive semidefinite")]
    IndefiniteForm,
    #[error("invalid Gram matrix: {0}")]
    InvalidGram(String),
    #[error("invalid surface: {0}")]
    InvalidSurface(String),
    #[error("cannot evaluate: {0}")]
    NotEvaluable(String),
    #[error("bisection is not invariant under the determinant involution")]
    NotInvariant,
    #[error("no smooth irreducible spectral cover with these invariants (4*Delta = {0} is not an integer)")]
    NonIntegralGenus(String),
    #[error("negative value not allowed: {0}")]
    Negative(String),
    #[error("fibre over {0} is a multiple fibre")]
    MultipleFibre(String),
    #[error("fibre over {0} lies over a branch point of the cover")]
    BranchFibre(String),
    #[error("invalid number of modification steps: {0}")]
    InvalidSteps(i64),
    #[error("d = {d} lies outside the admissible range [{lo}, {hi}]")]
    DegreeOutOfRange { d: i64, lo: i64, hi: i64 },
    #[error("no integer subbundle degree is admissible for g = {g}, m = {m}")]
    EmptyDegreeRange { g: u32, m: String },
    #[error("the subbundle degree d must be supplied for genus {0}")]
    MissingDegree(u32),
    #[error("no base bisection available: {0}")]
    NoBaseBisection(String),
    #[error("recipe replay mismatch: {0}")]
    ReplayMismatch(String),
    #[error("no holomorphic rank-2 bundle exists: {0}")]
    NotExists(String),
    #[error("spectral verification failed at fibre {fibre}: residual {residual:e}")]
    VerificationFailed { fibre: String, residual: f64 },
    #[error("inconsistent data: {0}")]
    Inconsistent(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
