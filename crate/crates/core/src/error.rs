use thiserror::Error;

use crate::bases::SpaceId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("the Kronecker symbol (m/n) is undefined for m = 0")]
    ZeroDiscriminant,

    #[error("coefficient index {index} is outside the series precision {prec}")]
    OutOfPrecision { index: usize, prec: usize },

    #[error("precision must be positive")]
    ZeroPrecision,

    #[error("series with zero constant term cannot be raised to a negative power")]
    NonUnitInverse,

    #[error("invalid eta quotient {quotient}: {reason}")]
    InvalidEtaQuotient { quotient: String, reason: String },

    #[error("Eisenstein series {spec} violates the parity condition chi(-1)psi(-1) = (-1)^k")]
    ParityViolation { spec: String },

    #[error("invalid quadratic form: {0}")]
    InvalidForm(String),

    #[error("form {form} is out of scope: {reason}")]
    NotInScope { form: String, reason: String },

    #[error("failed to construct basis element {label}: {source}")]
    BasisConstruction {
        label: String,
        #[source]
        source: Box<Error>,
    },

    #[error("basis for {space} is rank deficient ({rank} < {dimension}); solving is refused")]
    RankDeficient {
        space: SpaceId,
        rank: usize,
        dimension: usize,
    },

    #[error("precision {prec} is below the required minimum {required}")]
    PrecisionTooLow { prec: usize, required: usize },

    #[error("target is not in the span of the basis: first mismatch at q^{index}")]
    Inconsistent { index: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("unknown name {name:?}{}", suggestions_suffix(.suggestions))]
    UnknownName {
        name: String,
        suggestions: Vec<String>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("table {table} has no row {key:?}")]
    MissingRow { table: u8, key: String },

    #[error("table row {key:?} in table {table} is quarantined: {reason}")]
    QuarantinedRow {
        table: u8,
        key: String,
        reason: String,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

fn suggestions_suffix(suggestions: &[String]) -> String {
    if suggestions.is_empty() {
        String::new()
    } else {
        format!("; did you mean one of: {}", suggestions.join(", "))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
