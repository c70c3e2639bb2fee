use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate Gibbs weight at level {index}")]
    DegenerateGibbsWeight { index: usize },

    #[error("{what} = {value} is outside its domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("precondition violated on `{field}`: {detail}")]
    Precondition { field: &'static str, detail: String },

    #[error("degenerate engine: {0}")]
    DegenerateEngine(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not unitary (Frobenius defect {defect:.3e})")]
    NotUnitary { defect: f64 },

    #[error("structurally impossible: {0}")]
    StructuralImpossibility(String),

    #[error("no dense product after {attempts} attempts (seed {seed})")]
    RetryExhausted { seed: u64, attempts: usize },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub(crate) fn precondition(field: &'static str, detail: impl Into<String>) -> Self {
        Error::Precondition {
            field,
            detail: detail.into(),
        }
    }
}
