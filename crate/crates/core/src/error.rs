//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("operation requires {expected} coupling, got {found}")]
    VariantMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("the delta kernel has no pointwise value; use the analytic-limit operations")]
    DeltaKernelPointwise,

    #[error("kernel evaluation at tau = {tau:e}: {reason}")]
    KernelDomain { tau: f64, reason: &'static str },

    #[error("quadrature failed to reach accuracy {requested:e} (achieved ~{achieved:e}); estimate {est_re:e} + {est_im:e}i")]
    QuadratureAccuracy {
        requested: f64,
        achieved: f64,
        est_re: f64,
        est_im: f64,
    },

    #[error("solver refinement failure: doubling the grid changes the result by {change:e} (limit {limit:e})")]
    RefinementFailure { change: f64, limit: f64 },

    #[error("amplitude modulus reached {max_abs} > 1, outside the unitarity bound")]
    UnitarityViolation { max_abs: f64 },

    #[error("degenerate cubic roots: |separation| = {separation:e}")]
    DegenerateRoots { separation: f64 },

    #[error("argument out of range for special function: |z| too large (growth exponent {exponent:e})")]
    RangeError { exponent: f64 },

    #[error("index {index} out of range for grid of length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("consistency check failed for {what}: relative deviation {deviation:e} exceeds {limit:e}")]
    ConsistencyError {
        what: &'static str,
        deviation: f64,
        limit: f64,
    },

    #[error("search failed: target never reached, best achieved {achieved:e}")]
    SearchFailure { achieved: f64 },

    #[error("decay time is infinite: Re c = 0")]
    InfiniteDecayTime,

    #[error("norm drifted by {drift:e} (limit {limit:e}) at t = {t:e}")]
    NormDrift { drift: f64, limit: f64, t: f64 },

    #[error("wavepacket reached the domain boundary at t = {t:e} (band probability {band_prob:e})")]
    DomainEscape { t: f64, band_prob: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-readable code for CLI error lines.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::VariantMismatch { .. } => "variant_mismatch",
            Error::DeltaKernelPointwise => "delta_kernel_pointwise",
            Error::KernelDomain { .. } => "kernel_domain",
            Error::QuadratureAccuracy { .. } => "quadrature_accuracy",
            Error::RefinementFailure { .. } => "refinement_failure",
            Error::UnitarityViolation { .. } => "unitarity_violation",
            Error::DegenerateRoots { .. } => "degenerate_roots",
            Error::RangeError { .. } => "range_error",
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::ConsistencyError { .. } => "consistency_error",
            Error::SearchFailure { .. } => "search_failure",
            Error::InfiniteDecayTime => "infinite_decay_time",
            Error::NormDrift { .. } => "norm_drift",
            Error::DomainEscape { .. } => "domain_escape",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }
}
