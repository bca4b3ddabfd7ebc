use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("element is not invertible: {0}")]
    NotInvertible(String),
    #[error("order undefined: {0}")]
    UndefinedOrder(String),
    #[error("precision exhausted: {0}")]
    Precision(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
