use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("luminal group velocity |v_a| = 1 is excluded (gamma_a^2 diverges)")]
    Luminal,

    #[error("phase velocity is undefined for zero momentum")]
    UndefinedPhaseVelocity,

    #[error("spectrum is not normalized: weights sum to {sum} (deficit {deficit:e})")]
    Normalization { sum: f64, deficit: f64 },

    #[error("no real solution: discriminant {discriminant:e} < 0")]
    NoRealSolution { discriminant: f64 },

    #[error("|p_perp|^2 = {pperp_sq} lies outside the real support (|p_perp| <= {pperp_max})")]
    OutOfSupport { pperp_sq: f64, pperp_max: f64 },

    #[error("paraxial form is degenerate: v_a * beta_p = 1 (v_a beta_p - 1 = {offset:e})")]
    DegenerateParaxial { offset: f64 },

    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),

    #[error("aliasing: {what} (measured spillover {spillover:e})")]
    Aliasing { what: String, spillover: f64 },

    #[error("invalid boost velocity v_L = {0} (|v_L| must be < 1)")]
    InvalidBoost(f64),

    #[error("peak tracking failed: {0}")]
    Tracking(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Process exit code used by the command-line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::InvalidParameter { .. } | Error::Luminal => 2,
            Error::Io(_) | Error::Format(_) => 4,
            _ => 3,
        }
    }
}
