use thiserror::Error;

/// Errors raised by the physics core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParams {
        name: &'static str,
        reason: &'static str,
    },
    #[error("atomic steady state is not unique (kernel dimension {dim}); supply an initial state")]
    DegenerateKernel { dim: usize },
    #[error("steady-state residual {residual:e} exceeds tolerance")]
    SolverFailure { residual: f64 },
    #[error("dressed determinant Z is singular (|Z| = {magnitude:e})")]
    SingularZ { magnitude: f64 },
    #[error("g2 is undefined: one of the modes is empty")]
    UndefinedG2,
    #[error("no phase entangles the modes (upper window bound {hi} <= -1)")]
    EmptyWindow { hi: f64 },
    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepFailure { t: f64, h: f64 },
    #[error("steady-state denominator M is singular (|M| = {magnitude:e})")]
    SingularM { magnitude: f64 },
    #[error("moment drift matrix is singular")]
    SingularDrift,
    #[error("point is dynamically unstable; its steady state is disregarded")]
    DisregardedUnstable,
    #[error("pump detuning is zero; the Raman-EIT coupling is undefined")]
    ZeroDetuning,
    #[error("cavity damping product equals the squared coupling (pole of the steady state)")]
    PoleAtXiSquared,
    #[error("no steady state: the resonant double-Raman point is unstable")]
    NonSteady,
    #[error("Fock truncation leak {leak:e} exceeds budget at n_max = {n_max}")]
    TruncationOverflow { leak: f64, n_max: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
