use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A physical or numerical parameter failed validation. `field` names the
    /// offending configuration key.
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    /// Both pump and Stokes amplitudes vanish, so the mixing angle and the
    /// effective coupling are undefined.
    #[error("degenerate pulse: pump and Stokes peak amplitudes are both zero")]
    DegeneratePulse,

    #[error("invalid initial state: {0}")]
    InvalidInitialState(String),

    /// The adaptive integrator could not meet its tolerance with a
    /// representable step.
    #[error("step size underflow at t = {t}: step {step:e} too small for the requested tolerance")]
    StepSizeUnderflow { t: f64, step: f64 },

    #[error("step budget of {max_steps} steps exhausted at t = {t}")]
    StepBudgetExhausted { t: f64, max_steps: usize },

    #[error("evolution record is empty")]
    EmptyRecord,

    /// Post-selection over {|1>, |3>} is undefined when that subspace holds
    /// no population.
    #[error("vanishing support: p1 + p3 = {0:e}, post-selection undefined")]
    VanishingSupport(f64),

    #[error("target superposition (0, 0) is not a state")]
    ZeroTarget,

    #[error("malformed input: {0}")]
    Format(String),

    /// The target has no overlap with |1>, so no dark state prepared from |1>
    /// can reach it.
    #[error("target unreachable: zero |1> component gives zero success probability")]
    TargetUnreachable,
}

impl Error {
    /// True for failures of the numerical integration itself, as opposed to
    /// bad inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::StepSizeUnderflow { .. } | Error::StepBudgetExhausted { .. }
        )
    }

    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
