use thiserror::Error;

/// Errors produced while designing, synthesizing or propagating a protocol.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid scaling spec: {0}")]
    InvalidSpec(String),

    #[error("trajectory mode mismatch: expected {expected}, got {got}")]
    ModeMismatch {
        expected: &'static str,
        got: &'static str,
    },

    /// A zero of u(s) in [0, 1] that is not cancelled by a zero of u''(s).
    #[error("genuine singularity of omega^2 at s = {s}")]
    GenuineSingularity { s: f64 },

    #[error("ODE integrator failed at t = {t}: {reason}")]
    IntegratorFailure { t: f64, reason: String },

    /// The quadrature integrand diverges inside the requested interval.
    #[error("singular integrand: {which} vanishes at t = {t}")]
    SingularIntegrand { which: &'static str, t: f64 },

    #[error("quadrature did not converge on [{a}, {b}]")]
    QuadratureFailure { a: f64, b: f64 },

    #[error("time {t} outside protocol window [0, {t_f}]")]
    TimeOutOfRange { t: f64, t_f: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid too small: {0}")]
    GridTooSmall(String),

    /// Evaluation requested where the reference trajectory u(t) vanishes.
    #[error("reference trajectory has a node at t = {t} (|u| = {u_abs:e})")]
    MirrorNode { t: f64, u_abs: f64 },

    #[error("bad covariance: {0}")]
    BadCovariance(String),

    #[error("invalid moment state: {0}")]
    InvalidState(String),
}

pub type Result<T> = std::result::Result<T, Error>;
