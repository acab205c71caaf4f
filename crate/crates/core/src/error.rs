use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("invalid utility: {0}")]
    InvalidUtility(String),

    #[error("dimension mismatch: utility expects {expected} objectives, payoff vector has {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("{0} utility is not differentiable")]
    NonDifferentiable(&'static str),

    #[error("recommendation {action} for player {player} has zero marginal probability")]
    ZeroMarginal { player: usize, action: usize },

    #[error("expected one utility per player ({expected}), got {actual}")]
    ArityMismatch { expected: usize, actual: usize },

    #[error("{count} strategy modifications exceed the enumeration cap of {cap}")]
    TooManyModifications { count: u128, cap: u128 },

    #[error("grid of {profiles} profiles exceeds the cap of {cap}")]
    GridTooLarge { profiles: u128, cap: u128 },

    #[error("optimization failed: {0}")]
    OptimizationFailed(String),

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("internal solver failure: {0}")]
    Solver(String),

    #[error("invalid experiment config: {0}")]
    ConfigInvalid(String),

    #[error("unknown catalog entry `{0}`")]
    UnknownName(String),

    #[error("{field}: {message}")]
    Parse { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            field: field.into(),
            message: message.into(),
        }
    }

    /// True for failures of the numerical backends rather than of the input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::OptimizationFailed(_) | Error::Infeasible | Error::Unbounded | Error::Solver(_)
        )
    }
}
