use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{field}: {message}")]
    Shape { field: String, message: String },

    #[error("algebra fails the Ito axioms ({0})")]
    AxiomFailure(String),

    #[error("algebra is not faithful: null_ideal has dimension {0}, quotient it first")]
    NotFaithful(usize),

    #[error(
        "left multiplication by `{label}` is not well defined on the GNS kernel \
         (residual {residual:e}); the tolerance is too coarse"
    )]
    IllDefinedRepresentation { label: String, residual: f64 },

    #[error("no quotient identity: the operator algebra has no unit (residual {residual:e})")]
    NoQuotientIdentity { residual: f64 },

    #[error("non-minimal or non-Euclidean central block: {0}")]
    NonMinimal(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("mode aliasing with N = {cells}: product grid entry ({i}, {k}) is {value:e}, expected 0")]
    Aliasing {
        cells: usize,
        i: i64,
        k: i64,
        value: f64,
        pairs: Vec<(i64, i64)>,
    },

    #[error("incomplete irrep set: sum of squared dimensions is {found}, group order is {order}")]
    IncompleteIrreps { found: usize, order: usize },

    #[error("toy Fock space of dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("presentation mismatch: {0}")]
    Presentation(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
}
