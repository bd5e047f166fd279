use thiserror::Error;

/// Errors raised by the solvers and the configuration layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{quantity} must be non-negative, got {value}")]
    Negative { quantity: &'static str, value: f64 },

    #[error("{quantity} must be strictly positive, got {value}")]
    NonPositive { quantity: &'static str, value: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid value for `{key}`: {message}")]
    Validation { key: &'static str, message: String },

    #[error("cutoff frequency {omega_c:e} rad/s does not match resonance {omega0:e} rad/s")]
    Detuned { omega_c: f64, omega0: f64 },

    #[error("frequency is at or below cutoff (omega/omega_c = {ratio})")]
    BelowCutoff { ratio: f64 },

    #[error("interface into a medium with zero wavenumber")]
    SingularInterface,

    #[error("m22 vanishes: spectral singularity, no scattering solution at this frequency")]
    ResonancePole,

    #[error("adaptive step size underflow at z = {z:e} m")]
    Stiffness { z: f64 },

    #[error("invalid sweep range: {0}")]
    InvalidRange(String),

    #[error("wavepacket placement: {0}")]
    Placement(String),

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("time step too large: dt*|V|/hbar = {ratio} (must be < 0.1)")]
    TimeStep { ratio: f64 },

    #[error("singular tridiagonal system at row {row}")]
    SingularSystem { row: usize },

    #[error("boundary contamination at t = {t:e} s: |psi| near the {side} wall is {level:e} of max; enlarge the grid")]
    Contamination { t: f64, side: &'static str, level: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
