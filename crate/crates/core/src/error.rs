use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("coordinate sequences differ: {left:?} vs {right:?}")]
    CoordinateMismatch { left: Vec<String>, right: Vec<String> },

    #[error("substitution produces a zero denominator")]
    ZeroDenominator,

    #[error("substitution is undefined on coordinate {0}")]
    UndefinedSubstitution(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("element is not closed (its differential is nonzero)")]
    NotClosed,

    #[error("incompatible complexes: {0}")]
    IncompatibleComplexes(String),

    #[error("generator {0} has no differential-form realization")]
    UnsupportedGenerator(String),

    #[error("jet truncation order {got} is too small, need at least {needed}")]
    TruncationTooSmall { needed: usize, got: usize },

    #[error("non-regular map: {0}")]
    NonRegular(String),

    #[error("model validation failed: {0}")]
    Validation(#[from] ValidationError),

    #[error("family is not compatible along morphism {morphism}")]
    IncompatibleFamily { morphism: String },

    #[error("guard tripped: {0}")]
    Guard(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Why a chart category or fibered cover was rejected at load time.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("missing identity for object {object}")]
    MissingIdentity { object: String },

    #[error("duplicate id {0}")]
    DuplicateId(String),

    #[error("unknown reference {0}")]
    UnknownReference(String),

    #[error("open composition: {then} after {first} is not in the composition table")]
    OpenComposition { first: String, then: String },

    #[error("composition {then} after {first} = {equals} has the wrong source, target or vertex map")]
    BadComposite {
        first: String,
        then: String,
        equals: String,
    },

    #[error("composition is not associative at ({f}, {g}, {h})")]
    NotAssociative { f: String, g: String, h: String },

    #[error("morphism {morphism} is not a simplicial map: {reason}")]
    NonSimplicialMap { morphism: String, reason: String },

    #[error("object {object}: {reason}")]
    BadComplex { object: String, reason: String },

    #[error("sub-object {sub_object} over {base}: {reason}")]
    Containment {
        base: String,
        sub_object: String,
        reason: String,
    },
}
