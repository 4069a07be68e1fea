use thiserror::Error;

/// Errors raised by the library. Every variant carries the offending value.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{what} must satisfy {constraint}, got {value}")]
    Domain {
        what: &'static str,
        constraint: &'static str,
        value: f64,
    },

    #[error("order m={m} out of range for degree l={ell}")]
    OrderOutOfRange { ell: usize, m: i64 },

    #[error("spectrum is empty")]
    EmptySpectrum,

    #[error("spectrum violates its envelope at {} multipole(s), first at l={}", .0.len(), .0.first().map(|v| v.ell).unwrap_or(0))]
    SpectrumEnvelope(Vec<crate::spectrum::Violation>),

    #[error("spectrum line {line}: {message}")]
    SpectrumParse { line: u64, message: String },

    #[error("coefficients in {basis:?} basis cannot be regularized with the {scheme:?} scheme")]
    BasisMismatch {
        basis: crate::sampling::Basis,
        scheme: crate::regularize::Scheme,
    },

    #[error("malformed coefficients: {0}")]
    Coefficients(String),

    #[error(
        "penalty bound is vacuous: the tail term (eps/2 - 4)/sqrt(2 pi) = {middle_term} is not positive for eps = {epsilon}"
    )]
    VacuousPenaltyBound { epsilon: f64, middle_term: f64 },

    #[error("invalid Monte Carlo configuration: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(what: &'static str, constraint: &'static str, value: f64) -> Error {
    Error::Domain {
        what,
        constraint,
        value,
    }
}
