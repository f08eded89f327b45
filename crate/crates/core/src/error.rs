use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Argument outside the mathematical domain of the function.
    #[error("{what}: argument {value} is outside the domain")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// `V̂0(q)` diverges logarithmically at `q = 0`.
    #[error("effective potential is singular at q = 0")]
    Singularity,

    #[error("Landau index l = {l} exceeds the supported maximum {max}")]
    Overflow { l: u32, max: u32 },

    /// Coupling at or above `2/pi`.
    #[error("gamma = {gamma} violates the subcritical condition gamma < 2/pi = {limit}")]
    Supercritical { gamma: f64, limit: f64 },

    #[error("{what}: quadrature did not converge (last relative change {change:e})")]
    Quadrature { what: &'static str, change: f64 },

    #[error("fit residual {rms:e} exceeds limit {limit:e}")]
    FitFailure { rms: f64, limit: f64 },

    #[error("assembly: {0}")]
    Assembly(String),

    #[error("eigensolver: {0}")]
    Eigensolver(String),

    /// The golden-section minimum landed on an edge of the search bracket.
    #[error("minimum at z_eff = {z_eff} (energy {energy}) sits on the bracket edge [{lo}, {hi}]")]
    BracketFailure {
        z_eff: f64,
        energy: f64,
        lo: f64,
        hi: f64,
    },

    #[error("need at least {need} usable points, have {have}")]
    InsufficientData { have: usize, need: usize },
}
