use thiserror::Error;

/// Failures raised by the scattering, timing, lattice and pulse modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Validation(String),

    #[error("energy {energy} is below the asymptotic potential {potential}: no open channel")]
    NoOpenChannel { energy: f64, potential: f64 },

    #[error("position {x} lies outside the profile extent [0, {extent}]")]
    OutOfRange { x: f64, extent: f64 },

    #[error("clock region is empty")]
    EmptyClockRegion,

    #[error("partial-wave series diverges: |r21 r23 exp(2ik'L)| = {loop_gain}")]
    ResummationDivergence { loop_gain: f64 },

    #[error("energy {energy} sits on the branch point of segment {segment} (V0 = {potential}); offset the energy")]
    RegimeAmbiguity {
        energy: f64,
        segment: usize,
        potential: f64,
    },

    #[error("logarithm singularity: |{amplitude}| = {magnitude:e} at a probe point")]
    LogSingularity { amplitude: &'static str, magnitude: f64 },

    #[error("phase jump of {jump} rad between probes exceeds pi/2 at step {step}")]
    PhaseJump { jump: f64, step: f64 },

    #[error("derivative did not converge: estimate {value}, error {error:e}, smallest step {step:e}")]
    DerivativeFailure { value: f64, error: f64, step: f64 },

    #[error("segment {segment} has E = V0 exactly; the traversal integrand diverges")]
    DivergentIntegrand { segment: usize },

    #[error("incident flux is zero")]
    ZeroFlux,

    #[error("unsupported channel for {method}: {channel}")]
    UnsupportedChannel {
        method: &'static str,
        channel: &'static str,
    },

    #[error("precondition failed for {method}: {reason}")]
    Precondition { method: &'static str, reason: String },

    #[error("grid error: {0}")]
    Grid(String),

    #[error("non-finite result: {0}")]
    NonFinite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
