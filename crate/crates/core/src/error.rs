use thiserror::Error;

/// Errors surfaced by the library and the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("finger count mismatch: {expected} Rake fingers, {got} jitter entries")]
    FingerMismatch { expected: usize, got: usize },

    #[error("jitter support half-width {support:.4e} s must be strictly less than the chip duration {chip:.4e} s")]
    JitterSupport { support: f64, chip: f64 },

    #[error("multiuser uncoded formulas require all interferers to share one energy")]
    UnequalInterfererEnergies,

    #[error("two-user formula requires exactly 2 users, got {0}")]
    NotTwoUsers(usize),

    #[error("channel delay spread exceeds the frame: M = {m} chips > N_c = {nc}")]
    DelaySpreadExceedsFrame { m: usize, nc: usize },

    #[error("no closed form for template-jitter case 3; use the Monte Carlo engine")]
    Case3Analytic,

    #[error("analytic evaluator unsupported: {0}")]
    AnalyticUnsupported(String),

    #[error("exact enumeration requires {0}")]
    EnumerationUnsupported(&'static str),

    #[error("enumeration too large: {0} outcomes exceed the 2^24 budget")]
    EnumerationTooLarge(u128),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("config parse error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
