//! Error type shared across the crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong when constructing domain values or running
/// simulations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid game parameters: {0}")]
    InvalidParams(String),

    #[error("perimeter position must lie in [0, 1), got {0}")]
    InvalidPoint(f64),

    #[error("invalid speed profile: {0}")]
    InvalidSpeedProfile(String),

    #[error("invalid schedule realization: {0}")]
    InvalidRealization(String),

    #[error("attack window [{start}, {end}) exceeds safe horizon {safe_end}; enlarge the realization horizon")]
    WindowExceedsHorizon { start: f64, end: f64, safe_end: f64 },

    #[error("horizon {horizon} too short: {reason}")]
    HorizonTooShort { horizon: f64, reason: String },

    #[error("count distribution mean must be nonnegative, got {0}")]
    NegativeMean(f64),

    #[error("mean {c} is infeasible on support {{0..{max_support}}}")]
    InfeasibleMean { c: f64, max_support: u32 },

    #[error("schedule yields {found} passes after burn-in, but the strategy needs {needed}")]
    InsufficientPasses { needed: u32, found: u32 },

    #[error("invalid attacker strategy: {0}")]
    InvalidStrategy(String),

    #[error("invalid count distribution: {0}")]
    InvalidDistribution(String),

    #[error("schedule spec: {0}")]
    SpecParse(String),

    #[error("declared rate cap {declared} is exceeded by the implied dispatch rate {implied}")]
    RateCapExceeded { declared: f64, implied: f64 },

    #[error("replications must be at least 1")]
    NoReplications,
}

impl Error {
    /// True for errors caused by bad inputs (parameters, specs, configs),
    /// as opposed to conditions arising while a simulation runs.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::WindowExceedsHorizon { .. } | Error::InsufficientPasses { .. }
        )
    }
}
