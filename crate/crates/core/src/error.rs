use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("magnitude is not determined by the known terms")]
    IndeterminateMag,
    #[error("zero magnitude raised to a non-positive power")]
    ZeroToNonpositivePower,
    #[error("division by zero")]
    DivisionByZero,
    #[error("series is identically zero")]
    ZeroSeries,
    #[error("result at this radius depends on truncated coefficients")]
    UncertifiedRadius,
    #[error("center does not lie in the open unit disk")]
    CenterOutsideDisk,
    #[error("disk is not contained in the circle through its center")]
    DiskNotInCircle,
    #[error("interpolation nodes are not pairwise distinct")]
    DuplicateNodes,
    #[error("pivot magnitude cannot be certified at the working truncation")]
    IndeterminatePivot,
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("separator radius collides with a critical radius")]
    SeparatorCollision,
    #[error("stage verification failed: {0}")]
    VerificationFailed(String),
    #[error("no stage plan satisfies the breakpoint inequalities")]
    InfeasibleHorizon,
    #[error("target out of range")]
    TargetOutOfRange,
    #[error("dense set has no admissible element in the required interval")]
    DenseSetTooCoarse,
    #[error("target exponent is not reachable in the value group")]
    TargetNotInValueGroup,
    #[error("duplicate centers")]
    DuplicateCenters,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
