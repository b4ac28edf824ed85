use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("amplitude must be nonnegative, got {0}")]
    NegativeAmplitude(f64),

    #[error("invalid truncation config: {0}")]
    InvalidConfig(String),

    #[error("truncation for amplitude {amplitude} needs more than {max_dim} Fock levels")]
    DimensionOverflow { amplitude: f64, max_dim: usize },

    #[error("amplitude {0} overflows the working floating-point range")]
    AmplitudeOverflow(f64),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("zero entry in output Gram matrix at ({0},{1})")]
    ZeroGramEntry(usize, usize),

    #[error("matrix has eigenvalue {eigenvalue:e} below clip threshold -{clip:e}")]
    NotPositive { eigenvalue: f64, clip: f64 },

    #[error("probability {0} outside [0,1]")]
    InvalidProbability(f64),

    #[error("input Gram matrix condition number {cond:.3e} exceeds {limit:.3e}")]
    IllConditioned { cond: f64, limit: f64 },

    #[error("bisection cannot resolve feasibility: dykstra inconclusive at p = {0}")]
    BisectionAmbiguous(f64),

    #[error("gain {0} out of the domain of this check")]
    GainOutOfRange(f64),

    #[error("second amplitude must be nonzero for the equal-output constraint")]
    ZeroAmplitude,

    #[error("Kraus sum exceeds identity: eigenvalue of I - sum A^dag A is {0:e}")]
    CompletionOvershoot(f64),

    #[error("coefficient matrix has {got} columns, expected {expected}")]
    CoefficientShape { got: usize, expected: usize },

    #[error("sweep grid has {0} points, exceeding the 10^8 guard")]
    GridTooLarge(u128),

    #[error("invalid sweep axis: {0}")]
    InvalidAxis(String),

    #[error("degenerate window or resolution < 2")]
    InvalidGrid,
}

pub type Result<T> = std::result::Result<T, Error>;
