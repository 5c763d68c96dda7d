use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("generator index {index} out of range 1..={max}")]
    InvalidGenerator { index: u32, max: u32 },

    #[error("tree order mismatch: k={left} vs k={right}")]
    ParamMismatch { left: u32, right: u32 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("spin {spin} outside 1..={q}")]
    InvalidSpin { spin: u32, q: u32 },

    #[error("kronecker symbol of an empty spin sequence is undefined")]
    EmptySpins,

    #[error("configuration has no spin for vertex {0}")]
    MissingVertex(String),

    #[error("literal A-set construction needs k = 2^(m-1) - 1 (got k={k}, m={m}); use the generalized constructor")]
    Regime { k: u32, m: u32 },

    #[error("k+1 = {generators} generators cannot get distinct nonzero vectors in {m} bits (at most {available})")]
    Pigeonhole {
        generators: u64,
        m: u32,
        available: u64,
    },

    #[error("invalid subgroup spec: {0}")]
    InvalidSpec(String),

    #[error("search space of {required} states exceeds budget {budget}")]
    BudgetExceeded { required: String, budget: u128 },

    #[error("unsupported regime: {0}")]
    Unsupported(String),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
