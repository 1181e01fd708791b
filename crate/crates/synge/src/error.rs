use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument was outside the mathematical domain of the routine.
    #[error("domain error in {context}: {message}")]
    Domain { context: &'static str, message: String },

    /// The unscaled Bessel value underflows; the exp-scaled value is reported instead.
    #[error("K_{order}({gamma}) underflows in f64; scaled value e^gamma*K = {scaled}")]
    Underflow { order: u8, gamma: f64, scaled: f64 },

    /// Adaptive quadrature did not reach the requested tolerance.
    #[error("quadrature failure in {context}: achieved {achieved:.3e}, requested {requested:.3e}")]
    Quadrature {
        context: &'static str,
        achieved: f64,
        requested: f64,
    },

    /// The ODE denominator g came too close to zero away from any expected event.
    #[error("singular denominator at s = {s}: |g| = {g_abs:.3e} below floor {floor:.3e}")]
    SingularDenominator { s: f64, g_abs: f64, floor: f64 },

    /// The adaptive step size underflowed before any terminal condition was met.
    #[error("step size underflow at s = {s}")]
    StepSizeUnderflow { s: f64 },

    /// The integrator exceeded its step budget.
    #[error("step budget exhausted at s = {s} after {steps} steps")]
    StepBudget { s: f64, steps: usize },

    /// Newton iteration for the jump conditions did not converge.
    #[error("Newton iteration diverged in {context}: residual {residual:.3e} after {iterations} iterations (last iterate u_tilde = {u_tilde}, gamma = {gamma})")]
    NewtonDiverged {
        context: &'static str,
        residual: f64,
        iterations: usize,
        u_tilde: f64,
        gamma: f64,
    },

    /// A converged jump solution violates the Lax admissibility ordering.
    #[error("converged jump solution violates the Lax condition: lambda_up = {lambda_up}, sigma = {sigma}, lambda_down = {lambda_down}")]
    LaxViolation {
        lambda_up: f64,
        sigma: f64,
        lambda_down: f64,
    },

    /// A root-bracketing step found no sign change where one was required.
    #[error("bracketing failure in {context}: no sign change over [{lo}, {hi}]")]
    Bracket { context: &'static str, lo: f64, hi: f64 },

    /// The solution violated an invariant guaranteed by the underlying theory,
    /// indicating an integration-tolerance problem rather than user error.
    #[error("internal inconsistency in {context}: {message}")]
    Inconsistency { context: &'static str, message: String },
}

impl Error {
    pub(crate) fn domain(context: &'static str, message: impl Into<String>) -> Self {
        Error::Domain {
            context,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Rejects non-finite or non-positive gamma up front.
pub(crate) fn check_gamma(context: &'static str, gamma: f64) -> Result<()> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::domain(context, format!("gamma must be positive and finite, got {gamma}")));
    }
    Ok(())
}
