use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The operation is not defined for the configured encoder mode.
    #[error("mode error: {0}")]
    Mode(String),

    #[error("not implemented: {0}")]
    NotImplemented(String),

    /// Evaluation point lies outside the fitted range.
    #[error("range error: {0}")]
    Range(String),

    /// A root-finding bracket does not contain a sign change.
    #[error("bracket error: f({lo}) and f({hi}) have the same sign")]
    Bracket { lo: f64, hi: f64 },

    /// The local inverse would divide by a zero slope.
    #[error("singular slope at segment {k}")]
    SingularSlope { k: u64 },

    /// Quadrature grid too coarse or too narrow for the requested accuracy.
    #[error("precision warning: {0}")]
    Precision(String),
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
