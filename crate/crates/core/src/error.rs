use thiserror::Error;

/// Errors raised by the core numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A wavelength or temperature lies outside the fitted range of a material model.
    #[error("{quantity} {value} {unit} is outside the validity range [{lo}, {hi}] {unit} of material model '{model}'")]
    Validity {
        model: String,
        quantity: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
        unit: &'static str,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("port {port} is outside the grid (valid ports 1..={count})")]
    Range { port: usize, count: usize },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("singular system: {0}")]
    Singularity(String),
    #[error("no convergence after {iterations} iterations: {reason}")]
    Convergence { iterations: usize, reason: String },
    #[error("material model error: {0}")]
    Material(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for errors that stem from leaving a material model's fitted domain.
    pub fn is_validity(&self) -> bool {
        matches!(self, Error::Validity { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
