use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed document: bad JSON, wrong shape, or a bad scalar.
    #[error("parse error: {0}")]
    Parse(String),
    /// Well-formed document that does not fit the game it refers to.
    #[error("semantic error: {0}")]
    Semantic(String),
    #[error("game is not valid: {0}")]
    InvalidGame(String),
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("unknown player {0}")]
    UnknownPlayer(usize),
    #[error("unknown notion {0:?}")]
    UnknownNotion(String),
    /// A desk-scale guard refused to run an exponential computation.
    #[error("resource cap exceeded: {what} needs {needed}, cap is {cap}")]
    CapExceeded { what: String, needed: u128, cap: u128 },
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
