use thiserror::Error;

/// Failures raised by the numerical pipeline.
///
/// Every message starts with the variant name so the CLI can surface it
/// verbatim in its one-line diagnostic.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("InvalidParams: {0}")]
    InvalidParams(String),

    #[error("QuadratureFailure: error estimate {estimate:.3e} above tolerance {tolerance:.3e} after {subdivisions} subdivisions")]
    QuadratureFailure {
        estimate: f64,
        tolerance: f64,
        subdivisions: usize,
    },

    #[error("UnsupportedRange: {0}")]
    UnsupportedRange(String),

    #[error("PositivityViolation: {0}")]
    PositivityViolation(String),

    #[error("FormViolation: off-X-pattern entry of magnitude {0:.3e}")]
    FormViolation(f64),

    #[error("DegenerateState: |c1(0)| and |c2(0)| both vanish, p_sc undefined")]
    DegenerateState,

    #[error("MultiRoot: Q1 - Q2 changes sign {0} times on (0, 1)")]
    MultiRoot(usize),

    #[error("DomainEdge: {0}")]
    DomainEdge(String),

    #[error("NoPeak: dp_sc/dlambda is monotone on [{0}, {1}]")]
    NoPeak(f64, f64),
}

impl Error {
    /// Variant name, used by the CLI diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidParams(_) => "InvalidParams",
            Error::QuadratureFailure { .. } => "QuadratureFailure",
            Error::UnsupportedRange(_) => "UnsupportedRange",
            Error::PositivityViolation(_) => "PositivityViolation",
            Error::FormViolation(_) => "FormViolation",
            Error::DegenerateState => "DegenerateState",
            Error::MultiRoot(_) => "MultiRoot",
            Error::DomainEdge(_) => "DomainEdge",
            Error::NoPeak(..) => "NoPeak",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
