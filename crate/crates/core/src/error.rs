use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension N = {dim}: {requirement}")]
    InvalidDimension { dim: usize, requirement: &'static str },

    #[error("subcritical parameter: μ = {mu} is below the critical Hardy constant μ₀ = {mu_critical} for N = {dim}")]
    SubcriticalParameter { mu: f64, mu_critical: f64, dim: usize },

    /// A parameter combination outside the range where the formulas hold.
    #[error("parameter restriction violated: {0}")]
    Restriction(String),

    #[error("weight {weight} is not integrable on the domain (N = {dim})")]
    DivergentWeight { weight: String, dim: usize },

    #[error("quadrature did not reach the requested accuracy: estimate {estimate:e} with error {achieved:e} (requested {requested:e})")]
    Accuracy { estimate: f64, achieved: f64, requested: f64 },

    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    Convergence { what: &'static str, iterations: usize, residual: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("cannot parse domain field `{field}`: {message}")]
    Parse { field: String, message: String },

    #[error("the origin coincides with grid node {index:?}; shift the box center")]
    OriginOnNode { index: Vec<usize> },

    #[error("incomplete bound inputs: {0}")]
    IncompleteInputs(&'static str),

    #[error("spectrum too short: need {needed} eigenvalues, have {available}")]
    InsufficientSpectrum { needed: usize, available: usize },

    #[error("β = {beta} is not below the largest computed eigenvalue {largest}; the count would be truncated")]
    Truncation { beta: f64, largest: f64 },

    #[error("partition function tail bound {tail:e} is not below 1e-6 of the value {value:e} at t = {t}; increase k_max or t")]
    TailDominates { t: f64, value: f64, tail: f64 },

    #[error("inconsistent inputs: {0}")]
    Inconsistent(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by the caller's parameters rather than by numerics or IO.
    pub fn is_parameter_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidDimension { .. }
                | Error::SubcriticalParameter { .. }
                | Error::Restriction(_)
                | Error::DivergentWeight { .. }
                | Error::Domain(_)
                | Error::Parse { .. }
                | Error::OriginOnNode { .. }
                | Error::IncompleteInputs(_)
                | Error::InsufficientSpectrum { .. }
                | Error::Truncation { .. }
                | Error::TailDominates { .. }
                | Error::Inconsistent(_)
        )
    }

    pub fn is_numerical_error(&self) -> bool {
        matches!(self, Error::Accuracy { .. } | Error::Convergence { .. })
    }
}
