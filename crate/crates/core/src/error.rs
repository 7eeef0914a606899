use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("minimal polynomial is reducible: {0}")]
    Reducible(String),
    #[error("invalid field definition: {0}")]
    InvalidField(String),
    #[error("sigma image is not a conjugation automorphism: {0}")]
    Sigma(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("elements belong to different number fields")]
    FieldMismatch,
    #[error("valuations are only supported over Q and imaginary quadratic fields")]
    UnsupportedField,
    #[error("valuation of zero requested")]
    ZeroElement,
    #[error("points are not generic: {0}")]
    NotGeneric(String),
    #[error("degenerate cross-ratio (value 0 or 1): {0}")]
    DegenerateCrossRatio(String),
    #[error("parameters (z, s, t) lie outside the admissible set K")]
    OutsideK,
    #[error("field has no sigma-antifixed square root of -1: {0}")]
    FieldLacksI(String),
    #[error("degenerate argument: {0}")]
    DegenerateArgument(String),
    #[error("relation {0} is not admitted in strict mode")]
    IllegalRelationInMode(String),
    #[error("parameter lies outside the figure-eight family: {0}")]
    OutsideFamily(String),
    #[error("element does not factor over the multiplicative basis: {0}")]
    UnfactoredElement(String),
    #[error("inconsistent cross-ratio structure: {0}")]
    InconsistentStructure(String),
    #[error("triangulation is missing face pairings: {0}")]
    MissingPairings(String),
    #[error("triangulation carries no geometric vertices: {0}")]
    MissingGeometry(String),
    #[error("Cartan invariants of the two triples differ: {0}")]
    CartanMismatch(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
