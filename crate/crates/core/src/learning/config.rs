use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};
use serde_json::Value;

use super::SignalMode;
use crate::optim::OptConfig;
use crate::{catalog, json, CorrelatedStrategy, Error, Monfg, Result, UtilitySpec};

/// Settings of a learning experiment.
///
/// In JSON, `game`, `utilities` and `correlated_strategy` may each be given
/// inline or as the name of a catalog entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(deserialize_with = "game_ref")]
    pub game: Monfg,
    #[serde(deserialize_with = "utilities_ref")]
    pub utilities: Vec<UtilitySpec>,
    #[serde(default = "default_mode")]
    pub signal_mode: SignalMode,
    #[serde(default, deserialize_with = "correlated_ref")]
    pub correlated_strategy: Option<CorrelatedStrategy>,
    #[serde(default = "defaults::trials")]
    pub trials: usize,
    #[serde(default = "defaults::episodes")]
    pub episodes: usize,
    #[serde(default = "defaults::follow_episodes")]
    pub follow_episodes: usize,
    #[serde(default = "defaults::alpha")]
    pub alpha: f64,
    #[serde(default = "defaults::epsilon_initial")]
    pub epsilon_initial: f64,
    #[serde(default = "defaults::epsilon_decay")]
    pub epsilon_decay: f64,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub opt_config: OptConfig,
}

mod defaults {
    pub fn trials() -> usize {
        100
    }
    pub fn episodes() -> usize {
        10_000
    }
    pub fn follow_episodes() -> usize {
        500
    }
    pub fn alpha() -> f64 {
        0.05
    }
    pub fn epsilon_initial() -> f64 {
        0.1
    }
    pub fn epsilon_decay() -> f64 {
        0.999
    }
}

fn default_mode() -> SignalMode {
    SignalMode::None
}

fn game_ref<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Monfg, D::Error> {
    match Value::deserialize(d)? {
        Value::String(name) => catalog::game(&name),
        v => json::game_from_value(&v),
    }
    .map_err(D::Error::custom)
}

fn utilities_ref<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<UtilitySpec>, D::Error> {
    match Value::deserialize(d)? {
        Value::String(name) => catalog::utility_pair(&name),
        v => json::utilities_from_value(&v),
    }
    .map_err(D::Error::custom)
}

fn correlated_ref<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<CorrelatedStrategy>, D::Error> {
    match Value::deserialize(d)? {
        Value::Null => Ok(None),
        Value::String(name) => catalog::correlated_strategy(&name).map(Some),
        v => json::correlated_from_value(&v).map(Some),
    }
    .map_err(D::Error::custom)
}

impl ExperimentConfig {
    /// A configuration with the default protocol and no signals.
    pub fn new(game: Monfg, utilities: Vec<UtilitySpec>) -> Self {
        ExperimentConfig {
            game,
            utilities,
            signal_mode: SignalMode::None,
            correlated_strategy: None,
            trials: defaults::trials(),
            episodes: defaults::episodes(),
            follow_episodes: defaults::follow_episodes(),
            alpha: defaults::alpha(),
            epsilon_initial: defaults::epsilon_initial(),
            epsilon_decay: defaults::epsilon_decay(),
            base_seed: 0,
            opt_config: OptConfig::default(),
        }
    }

    pub fn with_signals(mut self, mode: SignalMode, sigma: CorrelatedStrategy) -> Self {
        self.signal_mode = mode;
        self.correlated_strategy = Some(sigma);
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::ConfigInvalid(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::ConfigInvalid(msg));
        crate::equilibrium::check_utilities(&self.game, &self.utilities)
            .map_err(|e| Error::ConfigInvalid(e.to_string()))?;
        if self.trials == 0 || self.episodes == 0 {
            return invalid("trials and episodes must be positive".into());
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return invalid(format!("alpha must lie in (0, 1], got {}", self.alpha));
        }
        if !(0.0..=1.0).contains(&self.epsilon_initial) {
            return invalid(format!("epsilon_initial must lie in [0, 1], got {}", self.epsilon_initial));
        }
        if !(self.epsilon_decay > 0.0 && self.epsilon_decay <= 1.0) {
            return invalid(format!("epsilon_decay must lie in (0, 1], got {}", self.epsilon_decay));
        }
        self.opt_config
            .validate()
            .map_err(|e| Error::ConfigInvalid(e.to_string()))?;
        match (self.signal_mode.uses_signals(), &self.correlated_strategy) {
            (true, None) => return invalid("signal modes need a correlated_strategy".into()),
            (true, Some(sigma)) => {
                sigma
                    .check(&self.game)
                    .map_err(|e| Error::ConfigInvalid(format!("correlated_strategy: {e}")))?;
                if self.follow_episodes >= self.episodes {
                    return invalid("follow_episodes must be smaller than episodes".into());
                }
            }
            (false, _) => {}
        }
        Ok(())
    }

    /// Seed of the generator of trial `index`.
    pub fn trial_seed(&self, index: usize) -> u64 {
        self.base_seed.wrapping_add(index as u64)
    }
}
