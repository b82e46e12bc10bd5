use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("modulus {0} is not squarefree")]
    NotSquarefree(u64),

    #[error("{what}: rounding residual {residual:e} exceeds {limit:e}")]
    Residual { what: &'static str, residual: f64, limit: f64 },

    #[error("integer overflow while {0}")]
    Overflow(&'static str),

    #[error("table covers n <= {available}, but {required} is required")]
    TableRange { required: usize, available: usize },

    #[error("coefficient sources disagree at n = {n}: {detail}")]
    SourceMismatch { n: u64, detail: String },

    #[error("invariant violated{}: {msg}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Invariant { line: Option<usize>, msg: String },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("quadrature did not converge on [{a}, {b}]: error estimate {estimate:e}")]
    NonConvergence { a: f64, b: f64, estimate: f64 },

    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    #[error("additive reduction at p = {0}")]
    AdditiveReduction(u64),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
