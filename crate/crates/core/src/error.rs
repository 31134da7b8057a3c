use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("kernel evaluated at tau = {0}, but tau must be > 0")]
    NonPositiveTau(f64),

    #[error("the Markovian kernel is a delta distribution; use its transform (ktilde) instead")]
    MarkovianKernelNotPointwise,

    #[error("K~(s) diverges at the branch point s = {re} + {im}i")]
    BranchPointSingularity { re: f64, im: f64 },

    #[error("quadrature did not converge: last estimate changed by {change:e} (tolerance {tolerance:e})")]
    QuadratureNonConvergence { change: f64, tolerance: f64 },

    #[error("steady state undefined: background decay gamma is zero, the final-value theorem does not apply")]
    GammaZeroSteadyStateUndefined,

    #[error("d Re(chi)/d delta diverges at the band-edge threshold delta = delta_g = {0}")]
    ThresholdDivergence(f64),

    #[error("operation `{operation}` does not support the {model} reservoir")]
    UnsupportedModel {
        operation: &'static str,
        model: &'static str,
    },

    #[error("step h = {step} too large: h * rate = {product:.3} exceeds the stability limit {limit}")]
    StepTooLarge { step: f64, product: f64, limit: f64 },

    #[error("inverse Laplace contour failed at t = {t}: {reason}")]
    ContourFailure { t: f64, reason: String },

    #[error("Talbot contour at t = {t} crosses the branch cut (branch point at Im s = {branch_im}); enable auto-shift")]
    BranchCrossing { t: f64, branch_im: f64 },

    #[error("pulse spectrum carries {fraction:e} of its energy outside the valid detuning window [{lo}, {hi}]")]
    BandwidthTooWide { fraction: f64, lo: f64, hi: f64 },

    #[error("output pulse energy {output:e} is below the floor {floor:e} (pulse absorbed)")]
    PulseAbsorbed { output: f64, floor: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("malformed CSV: {0}")]
    Format(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
