use thiserror::Error;

use crate::expr::ExprError;

/// Errors raised by the solvers and by problem construction.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("p must exceed 1 (got {0})")]
    ExponentOutOfRange(f64),

    #[error("{name} has {got} entries, expected {expected}")]
    LengthMismatch {
        name: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("{name}[{index}] = {value} is not strictly positive and finite")]
    NonPositiveWeight {
        name: &'static str,
        index: usize,
        value: f64,
    },

    #[error("the DN case needs N >= 1")]
    EmptyIndexSet,

    #[error("index {index} outside {lo}..={hi}")]
    IndexOutOfRange { index: usize, lo: usize, hi: usize },

    #[error("function value at index {index} is {value}; a strictly positive function is required")]
    NonPositiveFunction { index: usize, value: f64 },

    #[error("function value at index {index} is not finite")]
    NonFiniteFunction { index: usize },

    #[error("the p-Dirichlet energy vanished")]
    ZeroEnergy,

    #[error("N = {n} exceeds the enumeration budget of {budget}")]
    EnumerationBudget { n: usize, budget: usize },

    #[error("the truncated family is empty for N = {0}")]
    EmptyFamily(usize),

    #[error("this routine requires p = 2 (got {0})")]
    NotLinear(f64),

    #[error("N = {n} exceeds the oracle limit of {limit}")]
    OracleSize { n: usize, limit: usize },

    #[error("oracle failure: {0}")]
    OracleFailure(String),

    #[error("invalid stop rule: {0}")]
    InvalidStopRule(String),

    #[error(transparent)]
    Expr(#[from] ExprError),

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
