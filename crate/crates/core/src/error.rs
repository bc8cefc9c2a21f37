use thiserror::Error;

/// Errors raised anywhere in the engine.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("conformance error: element has {found} coefficients, algebra has dimension {expected}")]
    Conformance { expected: usize, found: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid algebra `{algebra}`: invariant `{invariant}` fails ({detail})")]
    InvalidAlgebra {
        algebra: String,
        invariant: &'static str,
        detail: String,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("window error: z^{exponent} lies below the validity bound z^{valid_from}")]
    Window { exponent: i64, valid_from: i64 },

    #[error("unknown variable index {index} (series has {count} variables)")]
    UnknownVariable { index: usize, count: usize },

    #[error("geometry `{geometry}` rejected: invariant `{invariant}` fails ({detail})")]
    InvalidGeometry {
        geometry: String,
        invariant: &'static str,
        detail: String,
    },

    #[error("invariant table: {0}")]
    Table(String),

    #[error("cancellation error: class {class} is not divisible by the divisor class")]
    Cancellation { class: String },

    #[error("missing source: {0}")]
    MissingSource(String),

    #[error("tau_D != 0: external data required ({0})")]
    ExternalDataRequired(String),

    #[error("truncation exceeded: {what} needs order >= {}, have {available}", needed_text(*.needed))]
    Truncation {
        what: String,
        needed: u64,
        available: u64,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// `u64::MAX` marks a requirement that no finite order meets.
fn needed_text(needed: u64) -> String {
    if needed == u64::MAX {
        "infinity (no finite order suffices)".into()
    } else {
        needed.to_string()
    }
}
