use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A documented precondition of the called operation does not hold.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid party index {index} for {parties} parties")]
    InvalidParty { index: usize, parties: usize },

    #[error("{0} did not converge")]
    NoConvergence(&'static str),

    #[error("enumeration only supports qubit parties with n = 2 or 3, got {0:?}")]
    UnsupportedShape(Vec<usize>),

    #[error("numeric failure in {context}: {detail}")]
    NumericFailure { context: String, detail: String },

    #[error("no PPT boundary: sum |a_i|^2/p_i = {0} does not exceed 1")]
    NoPptBoundary(f64),

    #[error("partial conjugates span {dims:?} dimensions; every Gamma(j) span must be 5")]
    DegenerateGammaSpan { dims: [usize; 3] },

    #[error("analytic lambda {analytic} disagrees with bisection boundary {numeric}")]
    LambdaAudit { analytic: f64, numeric: f64 },

    #[error("unknown example {0:?}")]
    UnknownExample(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}
