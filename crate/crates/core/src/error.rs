use thiserror::Error;

/// Every failure the library reports. Variants carry the offending indices so
/// callers can point at the exact box, vertex or line.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("box {0} lies outside the domain")]
    OutOfBounds(usize),
    #[error("boxes {0} and {1} overlap")]
    Overlap(usize, usize),
    #[error("boxes leave {0} unit cells uncovered")]
    CoverageGap(i128),
    #[error("invalid box: {0}")]
    InvalidBox(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("chains for simplex {0:?} disagree in orientation")]
    SeedConflict(Vec<usize>),
    #[error("{0:?} is not a top-dimensional simplex")]
    NotTopSimplex(Vec<usize>),
    #[error("vertex {0} is not placed strictly inside its box")]
    NotFaithful(usize),
    #[error("vertex {0} is not half-integral")]
    NotHalfIntegral(usize),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("syntax error on line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("paths {0} and {1} share a grid point or edge")]
    DisjointnessViolation(usize, usize),
    #[error("clause {0} does not have exactly three paths")]
    ClauseArity(usize),
    #[error("instance violates a structural rule: {0}")]
    InvalidInstance(String),
    #[error("routing failed: {0}")]
    RoutingFailure(String),
    #[error("cycle of variable {0} mixes front and back halves")]
    InconsistentCycle(usize),
    #[error("clause {0} is not satisfied by the assignment")]
    UnsatisfiedClause(usize),
    #[error("beta must exceed {0}")]
    BetaTooSmall(String),
    #[error("no admissible (a, b) found within the search bound")]
    NoFeasibleAB,
    #[error("box side {side} is below the fillable bound {bound}")]
    TooSmall { side: i64, bound: String },
    #[error("length {0} is not representable")]
    NotRepresentable(String),
    #[error("expected {expected} sets, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("too large to materialize: {0}")]
    TooLarge(String),
}

pub type Result<T> = std::result::Result<T, Error>;
