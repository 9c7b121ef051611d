use thiserror::Error;

/// Errors raised by matrix construction, witness/network factories and the
/// detection protocol.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid factor dimensions {0:?}: need a non-empty list with every entry >= 2")]
    InvalidDims(Vec<usize>),

    #[error("must keep at least one factor")]
    EmptyKeepSet,

    #[error("factor index {index} out of range for {factors} factors")]
    FactorOutOfRange { index: usize, factors: usize },

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("trace is not one (got {0})")]
    InvalidTrace(f64),

    #[error("skew-symmetric unitary requires even dimension (got {0})")]
    OddDimension(usize),

    #[error("invalid dimension {0} for this construction")]
    InvalidDimension(usize),

    #[error("invalid lambda vector: {0}")]
    InvalidLambda(String),

    #[error("not a valid Bell-diagonal witness (cyclic inequality value {worst:.6} > {bound})")]
    CyclicInequality { worst: f64, bound: f64 },

    #[error("threshold η would be 0; witness not realizable this way")]
    ZeroThreshold,

    #[error("operator has no negative eigenvalue (min {0:.3e}); it detects nothing")]
    NotAWitness(f64),

    #[error("degenerate denominator in decomposable network (λd² = 1)")]
    DegenerateDecomposition,

    #[error("infeasible decomposition term {index}: {reason}")]
    InfeasibleTerm { index: usize, reason: String },

    #[error("post-selection probability vanishes ({0:.3e})")]
    VanishingPostSelection(f64),

    #[error(
        "verdict disagreement: singlet fraction {fraction} vs η {eta}, tr[ρW] = {expectation}"
    )]
    VerdictMismatch {
        fraction: f64,
        eta: f64,
        expectation: f64,
    },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid label set: {0}")]
    InvalidLabelSet(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
