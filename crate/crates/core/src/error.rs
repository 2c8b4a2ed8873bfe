use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate Floquet spectrum: {0}")]
    DegenerateSpectrum(String),

    #[error("aliasing: n_max = {n_max} exceeds grid size {grid} / 4")]
    Aliasing { n_max: usize, grid: usize },

    #[error("jump channels {first} and {second} share the frequency {omega:.6e} rad/s")]
    FrequencyCollision {
        first: String,
        second: String,
        omega: f64,
    },

    #[error("no jump channel survives the threshold {0:e}")]
    NoChannels(f64),

    #[error("jump with zero-norm image on channel {0}")]
    ImpossibleJump(String),

    #[error("time step too large: total jump probability per step {0:.3} exceeds 0.5")]
    TimeStepTooLarge(f64),

    #[error("degenerate rate matrix: both transition rates vanish at X = {0:e}")]
    DegenerateRates(f64),

    #[error("grid touches the singular boundary X = 0")]
    SingularBoundary,

    #[error("drift does not change sign on the grid")]
    NoSteadyState,

    #[error("linearized drift is not stable: dJ/dX = {0:e} >= 0")]
    Unstable(f64),

    #[error("scheme failure: {0}")]
    SchemeFailure(String),

    #[error("kick of {kick:e} K^2 is not aligned with grid spacing {spacing:e} K^2")]
    GridMisaligned { kick: f64, spacing: f64 },

    #[error("insufficient samples: need {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("empty histogram range [{0}, {1})")]
    EmptyRange(f64, f64),

    #[error("band [{lo:e}, {hi:e}] rad/s not resolvable")]
    UnresolvableBand { lo: f64, hi: f64 },

    #[error("relaxation fit did not converge: {0}")]
    FitFailed(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Coarse classification used for process exit codes.
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Config(_) | Error::GridMisaligned { .. } | Error::InvalidInput(_) => {
                ErrorKind::Config
            }
            Error::Io(_) | Error::Json(_) => ErrorKind::Io,
            _ => ErrorKind::Numerical,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Numerical,
    Io,
}

pub type Result<T> = std::result::Result<T, Error>;
