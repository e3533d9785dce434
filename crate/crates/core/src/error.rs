use thiserror::Error;

/// Errors produced by the simulation and engine layers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A frequency profile evaluated to a non-finite value.
    #[error("frequency profile evaluated to a non-finite value at t = {t}")]
    ProfileEvaluation { t: f64 },

    /// The adaptive step size underflowed; the problem is too stiff for the
    /// requested tolerance.
    #[error("step size underflow at t = {t} (h = {h:.3e}, tol = {tol:.3e})")]
    Stiffness { t: f64, h: f64, tol: f64 },

    /// An argument fell outside the mathematical domain of an operation.
    #[error("domain error in {op}: {reason}")]
    Domain { op: &'static str, reason: String },

    /// A parameter failed its precondition.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A sample grid is too coarse for the requested finite-difference check.
    #[error(
        "sample grid too coarse: {points_per_period:.1} points per Rabi period, \
         at least {required} required"
    )]
    Resolution {
        points_per_period: f64,
        required: usize,
    },

    /// The truncated Fock basis leaks probability beyond the tolerated tail.
    #[error("Fock truncation tail {tail:.3e} at n_max = {n_max} exceeds {limit:.1e}")]
    Truncation { tail: f64, n_max: usize, limit: f64 },

    /// Cycle-duration estimation needs a nonzero modulation amplitude.
    #[error("no parametric resonance: modulation amplitude delta must be positive")]
    NoResonance,

    /// The cycle optimizer found no usable minimum of |C(t)|^2 in its window.
    #[error(
        "resonance miss: min |C|^2 = {min_c_sq:.6} at t = {t_at_min:.6} in \
         window [{window_lo:.6}, {window_hi:.6}] (need < 0.5)"
    )]
    ResonanceMiss {
        min_c_sq: f64,
        t_at_min: f64,
        window_lo: f64,
        window_hi: f64,
    },

    /// A cycle run was requested on a profile that does not return to its
    /// initial frequencies at the cycle end.
    #[error(
        "cycle not closed at t_c = {t_c}: omega_a drifts by {omega_a_drift:.3e}, \
         omega_b by {omega_b_drift:.3e}"
    )]
    CycleNotClosed {
        t_c: f64,
        omega_a_drift: f64,
        omega_b_drift: f64,
    },

    /// An internal numerical consistency check failed.
    #[error("numerical failure: {reason}")]
    NumericalFailure { reason: String },
}

impl Error {
    pub(crate) fn domain(op: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            op,
            reason: reason.into(),
        }
    }

    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn numerical(reason: impl Into<String>) -> Self {
        Error::NumericalFailure {
            reason: reason.into(),
        }
    }
}
