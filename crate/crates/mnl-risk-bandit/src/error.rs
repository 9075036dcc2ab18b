//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by distribution construction, criterion evaluation,
/// optimization, simulation, and file handling.
#[derive(Debug, Error)]
pub enum Error {
    /// An assortment references a product id outside `1..=N`, or contains
    /// duplicate ids.
    #[error("invalid assortment: {0}")]
    InvalidAssortment(String),

    /// A criterion or operation parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An input value or input combination violates a precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Atom payoffs or masses do not form a probability distribution on [0, 1].
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// Exhaustive subset enumeration was requested for a problem too large
    /// to enumerate; use local search instead.
    #[error("enumeration too large: {n_products} products exceeds cap {cap}; use local search")]
    EnumerationTooLarge { n_products: usize, cap: usize },

    /// An agent method was called in the wrong phase of the episode loop.
    #[error("phase error: {0}")]
    Phase(String),

    /// An episode result is inconsistent with the assortment that was served.
    #[error("inconsistent episode result: {0}")]
    Inconsistent(String),

    /// A textual encoding (criterion, algorithm, suite name) failed to parse.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
