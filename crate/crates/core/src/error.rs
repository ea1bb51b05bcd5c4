use thiserror::Error;

/// Every failure mode surfaced by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus parameter {0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("invalid context: {0}")]
    InvalidContext(String),
    #[error("matrix is not a symplectic similitude")]
    NonSimilitude,
    #[error("multiplier is not invertible in the coefficient ring")]
    NonInvertibleMultiplier,
    #[error("block is singular in the coefficient ring")]
    SingularBlock,
    #[error("requested level {level} exceeds the working precision {precision}")]
    LevelExceedsPrecision { level: u32, precision: u32 },
    #[error("element does not lie in the parahoric subgroup")]
    NotInParahoric,
    #[error("valuations are too close to the precision budget to certify a branch")]
    PrecisionExhausted,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("conjugate is not integral: the torus element lies outside the semigroup cone")]
    NonIntegralConjugate,
    #[error("scale refused: {0}")]
    ScaleRefused(String),
    #[error("counterexample found: {0}")]
    CounterexampleFound(String),
    #[error("double cosets live at different levels or parabolics")]
    LevelMismatch,
    #[error("weight violates the parity condition")]
    ParityViolation,
    #[error("weight is not dominant")]
    NonDominant,
    #[error("weight is not regular")]
    NonRegular,
    #[error("{0} does not lie in the admissible Levi Weyl set")]
    InvalidWQ(String),
    #[error("degree {0} is not supported for this parabolic")]
    UnsupportedDegree(u32),
    #[error("place degrees do not add up to the field degree")]
    InconsistentDegrees,
    #[error("slope data is underdetermined: {0}")]
    UnderdeterminedCase(String),
    #[error("input is not sorted strictly increasingly")]
    UnsortedInput,
    #[error("polygons have different endpoints")]
    EndpointMismatch,
    #[error("Hodge-Tate data depends on the embedding")]
    IndependenceViolated,
    #[error("unknown parabolic {0:?}")]
    UnknownParabolic(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
