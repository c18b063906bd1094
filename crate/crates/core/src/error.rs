use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid permutation {values:?}: {reason}")]
    InvalidPermutation { values: Vec<i64>, reason: &'static str },

    #[error("position {position} is outside the supported range 1..=63")]
    PositionOutOfRange { position: usize },

    #[error("position {position} is out of range for n = {n}")]
    IndexOutOfRange { position: usize, n: usize },

    #[error("n = {n} must exceed the largest position {max}")]
    SizeTooSmall { n: usize, max: usize },

    #[error("n = {n} exceeds the enumeration cap {cap}")]
    CapExceeded { n: usize, cap: usize },

    #[error("center {center} is below the largest position {max}")]
    CenterTooSmall { center: usize, max: usize },

    #[error("{set} is not an admissible peak set")]
    NotAdmissible { set: String },

    #[error("position {position} is not a spike of {perm}")]
    NotASpike { position: usize, perm: String },

    #[error("{perm} admits no {position}-flip")]
    FlipNotAdmitted { position: usize, perm: String },

    #[error("{subset} is not a subset of {set}")]
    NotASubset { subset: String, set: String },

    #[error("flip positions {set} are not separated by gaps of at least two")]
    FlipsNotSeparated { set: String },

    #[error("|P({set}, {n})| = {count} is not divisible by 2^{exponent}")]
    NotDivisible { set: String, n: usize, count: String, exponent: usize },

    #[error("cannot recenter to {center}: coefficient {index} is nonzero")]
    RecenterBelowDegree { center: usize, index: usize },

    #[error("partition depth {depth} exceeds n = {n}")]
    DepthTooLarge { depth: usize, n: usize },

    #[error("center {center} needs {expected} coefficients, got {got}")]
    CoefficientCount { center: usize, expected: usize, got: usize },

    #[error("a count came out negative: {0}")]
    NegativeCount(String),

    #[error("parse error: {0}")]
    Parse(String),
}
