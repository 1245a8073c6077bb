use thiserror::Error;

use crate::ball::CertifiedReal;

/// Errors raised by the constructions in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("point {0} lies within the singular neighbourhood of an arc endpoint")]
    Singular(String),

    #[error("quadrature budget exceeded; best enclosure {best}")]
    QuadratureBudget { best: CertifiedReal },

    #[error("precision budget exceeded: {0}")]
    PrecisionBudget(String),

    #[error("cover infeasible: {0}")]
    InfeasibleCover(String),

    #[error("Cauchy name rate violated between terms {index} and {next}: distance {distance} is not below {bound}")]
    NameRate {
        index: usize,
        next: usize,
        distance: f64,
        bound: f64,
    },

    #[error("Schnorr cover exhausted: {0}")]
    InsufficientCover(String),

    #[error("certificate failed for cell ({n},{k}): {reason}")]
    CellFailure { n: u32, k: u32, reason: String },

    #[error("certificate failed: {0}")]
    Certificate(String),

    #[error("point not captured by the truncated assembly: {0}")]
    NotCaptured(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
