use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} is not a prime in [2, 2^31)")]
    BadModulus(u64),
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(u32, u32),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("no solution: right-hand side is outside the column span")]
    NoSolution,
    #[error("cycle detected in cover relation through `{0}`")]
    CycleDetected(String),
    #[error("duplicate element name `{0}`")]
    DuplicateName(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("poset dimension exceeds 1")]
    DimensionTooHigh,
    #[error("subset is not closed: `{0}` is a minimal upper bound outside it")]
    NotClosed(String),
    #[error("bad realization coordinate {0}: must lie strictly between -1 and 0")]
    BadCoordinate(String),
    #[error("bad realization point: {0}")]
    BadPoint(String),
    #[error("transfer undefined at `{0}`: lower set has no greatest element")]
    TransferUndefined(String),
    #[error("not functorial: {0}")]
    NotFunctorial(String),
    #[error("boundary squares to nonzero at element `{element}` in degree {degree}")]
    NotChainComplex { element: String, degree: usize },
    #[error("structure map along `{y}` -> `{x}` is not a chain map in degree {degree}")]
    NotChainMap { y: String, x: String, degree: usize },
    #[error("kernel of the minimal cover is not projective")]
    KernelNotProjective,
    #[error("homology in degree {0} has no resolution of length at most 1")]
    HomologyNotResolvable(usize),
    #[error("object is not cofibrant: degree {0} is not projective")]
    NotCofibrant(usize),
    #[error("object is zero")]
    ZeroObject,
    #[error("endomorphism is not idempotent")]
    NotIdempotent,
    #[error("bad cover: {0}")]
    BadCover(String),
    #[error("unknown example `{0}`")]
    UnknownExample(String),
    #[error("construction did not terminate within {0} degrees")]
    NoTermination(usize),
    #[error("exhaustive search over {p}^{dim} elements exceeds budget {budget}")]
    BudgetExceeded { p: u32, dim: usize, budget: u64 },
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
