use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Every variant carries the offending parameter, point or node so that the
/// CLI can report the failing stage without extra context.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point ({re}, {im}) lies outside the closed unit disk")]
    OutsideDisk { re: f64, im: f64 },

    #[error("point ({re}, {im}) is too close to the unit circle for {operation}")]
    TooCloseToBoundary {
        operation: &'static str,
        re: f64,
        im: f64,
    },

    #[error("boundary projection is undefined at the origin")]
    ProjectionAtOrigin,

    #[error("non-finite value {value} at quadrature node {index} ({re}, {im})")]
    NonFinite {
        index: usize,
        re: f64,
        im: f64,
        value: String,
    },

    #[error("kernel is near-singular: |1 - conj(z) w| = {gap:e} at z = ({z_re}, {z_im}), w = ({w_re}, {w_im})")]
    NearSingular {
        gap: f64,
        z_re: f64,
        z_im: f64,
        w_re: f64,
        w_im: f64,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("quadrature self-test failed: {0}")]
    SelfTest(String),

    #[error(
        "power iteration did not converge after {iterations} iterations \
         (last estimate {estimate}, relative change {residual:e})"
    )]
    NoConvergence {
        iterations: usize,
        estimate: f64,
        residual: f64,
    },

    #[error("quadrature resolution too coarse: Gram form has eigenvalue {min_eigenvalue:e} below -1e-9")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("cannot parse symbol: bad token `{token}` ({reason})")]
    Parse { token: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
