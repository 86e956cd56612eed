use thiserror::Error;

use crate::tp::TpValidationReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("basis index arithmetic overflowed")]
    IndexOverflow,
    #[error("unknown not registered: {0}")]
    UnknownNotFound(String),
    #[error("duplicate unknown: {0}")]
    DuplicateUnknown(String),
    #[error("operator evaluated outside its domain: {0}")]
    DomainError(String),
    #[error("exhaustive run needs {needed} cases, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("no equation qualified for the requested windows")]
    EmptySystem,
    #[error("invalid window [{lo}, {hi}]")]
    InvalidWindow { lo: i64, hi: i64 },
    #[error("the functional f must be nonzero")]
    ZeroFunctional,
    #[error("parameters violate the structure constraints")]
    InvalidParams(Box<TpValidationReport>),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
