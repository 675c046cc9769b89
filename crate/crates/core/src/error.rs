use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid {field}: {reason}")]
    InvalidInput { field: String, reason: String },
    #[error("{what} needs {needed} units of work, over the budget of {budget}")]
    BudgetExceeded { what: String, needed: f64, budget: f64 },
    #[error("precision shortfall: {needed} mantissa bits needed, at most {max} allowed")]
    PrecisionShortfall { needed: usize, max: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("integer overflow in {0}")]
    Overflow(String),
}

impl Error {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidInput { field: field.into(), reason: reason.into() }
    }

    pub fn domain(reason: impl Into<String>) -> Self {
        Error::Domain(reason.into())
    }

    pub fn budget(what: impl Into<String>, needed: f64, budget: f64) -> Self {
        Error::BudgetExceeded { what: what.into(), needed, budget }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
