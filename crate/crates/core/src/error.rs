use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Two inputs that must share structure (base category, source, target) do not.
    #[error("incompatible inputs: {0}")]
    Incompatible(String),

    #[error("invalid structure: {0}")]
    Invalid(String),

    #[error("unknown catalog key `{key}` (known keys: {})", known.join(", "))]
    NotFound { key: String, known: Vec<String> },

    #[error("sequence has not converged; no algebra structure is available")]
    AbsentAlgebra,

    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A condition that the constructions guarantee was observed to fail.
    #[error("internal consistency violated: {0}")]
    Internal(String),

    #[error("input error at {}: {message}", if pointer.is_empty() { "document root" } else { pointer.as_str() })]
    Input { pointer: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn input(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Input {
            pointer: pointer.into(),
            message: message.into(),
        }
    }
}
