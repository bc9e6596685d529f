use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A configured size limit would be exceeded.
    #[error("capacity exceeded: {what} needs {requested} but the cap is {cap} ({hint})")]
    Capacity {
        what: &'static str,
        requested: u128,
        cap: u128,
        hint: &'static str,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A series did not settle into decreasing terms.
    #[error("series diverges: {0}")]
    Divergence(String),

    /// Parameters fall outside the region where a limit formula holds.
    #[error("outside validity region: {0}")]
    Validity(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
