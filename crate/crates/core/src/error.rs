use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("empty frequency band: omega_max = {omega_max} does not exceed mass = {mass}")]
    EmptyBand { mass: f64, omega_max: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("mode sum did not converge: {0}")]
    Convergence(String),

    #[error("quadrature did not reach tolerance {requested:e} (achieved {achieved:e})")]
    Accuracy { requested: f64, achieved: f64 },

    #[error("atom tail mass {tail:e} exceeds {bound:e}; use m_max >= {suggested}")]
    Truncation { tail: f64, bound: f64, suggested: usize },

    #[error("inversion window error: {0}")]
    Window(String),

    #[error("Fock cutoff {cutoff} not converged (change {change:e}); try cutoff >= {suggested}")]
    Cutoff { cutoff: usize, change: f64, suggested: usize },

    #[error("Hilbert space dimension {dim} exceeds the cap of {cap}")]
    Dimension { dim: usize, cap: usize },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter { name, reason: reason.into() }
    }
}
