use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by constructors and operations across the crate.
///
/// Constructors reject invalid data rather than repairing it, so every
/// invariant violation surfaces here.
#[derive(Debug, Error)]
pub enum Error {
    #[error("finite set must contain at least one element")]
    EmptySet,

    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),

    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    #[error("weight {weight} at index {index} is negative")]
    NegativeWeight { index: usize, weight: f64 },

    #[error("weights sum to {sum}, expected 1 within {tol}")]
    NotNormalized { sum: f64, tol: f64 },

    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("distributions live on different spaces")]
    SpaceMismatch,

    #[error("coefficient {0} outside [0, 1]")]
    CoefficientOutOfRange(f64),

    #[error(
        "not measure-preserving: pushforward differs from the codomain \
         distribution by {deviation} at `{label}`"
    )]
    NotMeasurePreserving { label: String, deviation: f64 },

    #[error("section law violated: (f \u{2218} s) at ({y}, {y_prime}) is {value}")]
    NotASection {
        y: String,
        y_prime: String,
        value: f64,
    },

    #[error("section entry at (x=`{x}`, y=`{y}`) is {value} although f(x) != y")]
    FiberSupportViolation { x: String, y: String, value: f64 },

    #[error("function is not surjective: `{0}` has empty preimage")]
    NotSurjective(String),

    #[error("objects do not match: {0}")]
    ObjectMismatch(String),

    #[error("expected {expected} inner operations, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("alpha {alpha} must lie in (0, 1) and below the minimum weight {min}")]
    AlphaTooLarge { alpha: f64, min: f64 },

    #[error("parametrized family changed spaces or function at t={0}")]
    FamilyShapeChanged(f64),

    #[error("point-mass label `{label}` is not in the fiber over `{fiber}`")]
    PolicyLabelOutsideFiber { label: String, fiber: String },

    #[error("policy column invalid for fiber over `{fiber}`: {reason}")]
    InvalidPolicyColumn { fiber: String, reason: String },

    #[error("parameters must differ")]
    DegenerateParameters,

    #[error("stage {stage}: {source}")]
    Stage {
        stage: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn at_stage(self, stage: usize) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
