use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at position {pos}: {message}")]
    Parse { pos: usize, message: String },

    #[error("unsupported function `{name}` at position {pos}")]
    UnsupportedFunction { name: String, pos: usize },

    #[error("domain error: x = {x} must be positive")]
    Domain { x: f64 },

    #[error("node set must contain at least one node")]
    EmptyNodeSet,

    #[error("nodes {i} and {j} are closer than the separation tolerance (gap {gap:e})")]
    DegenerateNodes { i: usize, j: usize, gap: f64 },

    #[error("invalid equation: {0}")]
    InvalidEquation(String),

    #[error("characteristic polynomial has a multiple root near {re}{im:+}i")]
    MultipleRootDetected { re: f64, im: f64 },

    #[error("root refinement did not converge (residual {residual:e})")]
    NonConvergence { residual: f64 },

    #[error("integral of {term} diverges at 0 for shift {shift}")]
    DivergentAtZero { term: String, shift: String },

    #[error("right-hand side power {power} resonates with characteristic root {root}")]
    ResonantExponent { power: String, root: String },

    #[error("exponent {exponent} does not exceed the largest root real part {max_root}")]
    ExponentBelowRoots { exponent: i64, max_root: f64 },

    #[error("quadrature tolerance not met: estimated error {achieved:e}, requested {requested:e}")]
    ToleranceNotMet { achieved: f64, requested: f64 },

    #[error("solution has imaginary residue {residue:e} (relative to {scale:e})")]
    ImaginaryResidue { residue: f64, scale: f64 },

    #[error("x = {x} too small for a stable difference stencil")]
    StepUnderflow { x: f64 },

    #[error("numeric residual supports orders up to 6, got {0}")]
    UnsupportedOrder(usize),

    #[error("perturbation {eps} violates |eps| < beta = {beta}")]
    BoundViolation { eps: f64, beta: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit status for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::UnsupportedFunction { .. } | Error::InvalidEquation(_) => 2,
            Error::InvalidInput(_) => 2,
            Error::MultipleRootDetected { .. } | Error::DegenerateNodes { .. } => 3,
            Error::NonConvergence { .. } => 3,
            Error::DivergentAtZero { .. } | Error::ExponentBelowRoots { .. } => 4,
            Error::ResonantExponent { .. } => 5,
            Error::ToleranceNotMet { .. } | Error::ImaginaryResidue { .. } => 6,
            Error::StepUnderflow { .. } | Error::UnsupportedOrder(_) => 6,
            Error::BoundViolation { .. } => 7,
            Error::Domain { .. } | Error::EmptyNodeSet => 2,
            Error::Io(_) => 1,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
