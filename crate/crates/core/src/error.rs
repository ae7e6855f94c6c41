use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("output covariance is singular")]
    SingularCovariance,

    #[error("no finite squeezing threshold for eta = {eta} (requires eta > 1/2)")]
    NoThreshold { eta: f64 },

    /// Raised below the analytic cutoff so callers fall back to numeric minimization.
    #[error("cubic for r = {r} is ill-conditioned; use the numeric minimizer")]
    IllConditionedCubic { r: f64 },

    #[error("cubic discriminant violated: cos(phi) = {cos_phi}")]
    DiscriminantViolation { cos_phi: f64 },

    /// The scan minimum sits on the bracket boundary. Carries that boundary point.
    #[error("no interior bracket: minimum at boundary x = {arg} (f = {value})")]
    NoBracket { arg: f64, value: f64 },

    #[error("no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("degenerate configuration: {0}")]
    Degenerate(&'static str),

    #[error("quadrature did not converge: last change {last_change:e} > tolerance {tolerance:e}")]
    NonConvergence { last_change: f64, tolerance: f64 },

    #[error("Fock truncation at N = {n} leaves tail mass {tail:e}")]
    TruncationInsufficient { n: usize, tail: f64 },

    #[error("unphysical state: {0}")]
    Unphysical(&'static str),
}

pub(crate) fn check_finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite",
        })
    }
}

pub(crate) fn check_range(name: &'static str, value: f64, lo: f64, hi: f64) -> Result<f64> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "out of range",
        })
    }
}
