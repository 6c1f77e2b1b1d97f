use thiserror::Error;

use crate::fading_model::Scheme;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "quadrature did not converge: estimate {estimate:e}, error bound {error_bound:e} > tolerance {tolerance:e} after {evaluations} evaluations"
    )]
    Quadrature {
        estimate: f64,
        error_bound: f64,
        tolerance: f64,
        evaluations: usize,
    },

    #[error("no tabulated asymptote for the {0} scheme")]
    UnsupportedScheme(Scheme),

    #[error("usage error: {0}")]
    Usage(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
