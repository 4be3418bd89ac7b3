use num_complex::Complex64;
use thiserror::Error;

use crate::siegert_solver::ScanRegion;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("residual evaluated within 1e-12 of a tan/cot pole at K = {k}")]
    PoleProximity { k: Complex64 },

    #[error(
        "Newton iteration did not converge after {iterations} iterations (last iterate {last})"
    )]
    NonConvergence { last: Complex64, iterations: usize },

    #[error("Newton iteration was captured by a residual pole near K = {k}")]
    PoleCapture { k: Complex64 },

    #[error("root in the upper half-plane off the imaginary axis: K = {k}")]
    InconsistentRoot { k: Complex64 },

    #[error(
        "incomplete scan: winding count does not match refined roots in {region:?} ({detail})"
    )]
    IncompleteScan { region: ScanRegion, detail: String },

    #[error("quadrature on [{lo}, {hi}] did not reach the requested tolerance (estimate {estimate:e}, error {error:e})")]
    QuadratureFailure {
        lo: f64,
        hi: f64,
        estimate: f64,
        error: f64,
    },

    #[error("density vanishes at x = {x}, t = {t}; the fleeing speed is singular there")]
    SingularNode { x: f64, t: f64 },

    #[error("step-halving check failed: L(t_end) changed by {relative:e} (relative); use a smaller step")]
    Accuracy { relative: f64 },

    #[error("Crank-Nicolson norm drift {drift:e} at step {step} exceeds 1e-8")]
    SchemeFailure { step: usize, drift: f64 },

    #[error("log-survival fit is not exponential (R^2 = {r_squared}, residual rms {rms:e})")]
    FitQuality { r_squared: f64, rms: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
