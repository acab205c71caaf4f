//! Independent learners with vectorial Q-estimates for one-shot games.
//!
//! Each agent keeps an estimate of the expected payoff vector of every
//! (signal, own action) pair, picks the mixed strategy maximising the utility
//! of the resulting expectation and plays it epsilon-greedily. Optional
//! correlation signals are drawn from a [`CorrelatedStrategy`] and each agent
//! only sees its own recommendation.

mod config;
mod metrics;
mod trial;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::optim::{maximize_utility_of_mixture, OptConfig};
use crate::{Error, MixedStrategy, Result, UtilitySpec};

pub use config::ExperimentConfig;
pub use metrics::{run_experiment, ExperimentMetrics, TrialSummary, CONVERGENCE_MASS, FINAL_WINDOW, SLIDING_WINDOW};
pub use trial::{run_trial, TrialTrace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignalMode {
    None,
    SingleSignal,
    MultiSignal,
}

impl SignalMode {
    pub fn uses_signals(self) -> bool {
        self != SignalMode::None
    }
}

impl std::str::FromStr for SignalMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(SignalMode::None),
            "single-signal" => Ok(SignalMode::SingleSignal),
            "multi-signal" => Ok(SignalMode::MultiSignal),
            _ => Err(Error::parse("signal_mode", format!("unknown signal mode `{s}`"))),
        }
    }
}

/// `q + alpha * (p - q)`, componentwise.
pub fn q_update(q: &[f64], p: &[f64], alpha: f64) -> Result<Vec<f64>> {
    if q.len() != p.len() {
        return Err(Error::ShapeMismatch(format!(
            "estimate has {} objectives, payoff has {}",
            q.len(),
            p.len()
        )));
    }
    Ok(q.iter().zip(p).map(|(q, p)| q + alpha * (p - q)).collect())
}

/// Learner state: `q[signal][action]` holds a payoff-vector estimate.
///
/// Without signals there is a single null signal `0`.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentState {
    pub q: Vec<Vec<Vec<f64>>>,
    pub epsilon: f64,
    /// Probability of each own recommendation (multi-signal agents only).
    pub own_marginals: Option<Vec<f64>>,
}

impl AgentState {
    /// Zero estimates for `num_signals x num_actions` pairs.
    pub fn new(num_signals: usize, num_actions: usize, num_objectives: usize, epsilon: f64) -> Self {
        AgentState {
            q: vec![vec![vec![0.0; num_objectives]; num_actions]; num_signals],
            epsilon,
            own_marginals: None,
        }
    }

    pub fn with_marginals(mut self, marginals: Vec<f64>) -> Self {
        self.own_marginals = Some(marginals);
        self
    }

    pub fn num_actions(&self) -> usize {
        self.q[0].len()
    }

    pub fn num_objectives(&self) -> usize {
        self.q[0][0].len()
    }

    /// Moves `Q(signal, action)` towards the received payoff vector.
    pub fn observe(&mut self, signal: usize, action: usize, payoff: &[f64], alpha: f64) -> Result<()> {
        let entry = &mut self.q[signal][action];
        if entry.len() != payoff.len() {
            return Err(Error::ShapeMismatch(format!(
                "estimate has {} objectives, payoff has {}",
                entry.len(),
                payoff.len()
            )));
        }
        for (q, p) in entry.iter_mut().zip(payoff) {
            *q += alpha * (p - *q);
        }
        Ok(())
    }
}

/// The mixed strategy maximising the utility of the agent's estimated
/// expected payoff vector, for the signal `signal`.
///
/// Without signals or with a single signal the search runs over the
/// simplex of `signal`'s row of estimates. With multiple signals one
/// distribution per own recommendation of positive marginal is optimised
/// jointly against the marginal-weighted expectation, and the distribution
/// for `signal` is returned.
pub fn optimal_mixed_strategy(
    agent: &AgentState,
    u: &UtilitySpec,
    mode: SignalMode,
    signal: usize,
    cfg: &OptConfig,
) -> Result<MixedStrategy> {
    if signal >= agent.q.len() {
        return Err(Error::InvalidStrategy(format!("signal {signal} out of range")));
    }
    let d = agent.num_objectives();
    let k = agent.num_actions();
    let (blocks, offset) = match (mode, &agent.own_marginals) {
        (SignalMode::MultiSignal, Some(marginals)) => {
            if marginals.get(signal).map_or(true, |&m| m <= 0.0) {
                return Err(Error::InvalidStrategy(format!("recommendation {signal} has zero marginal")));
            }
            let blocks: Vec<(f64, &[Vec<f64>])> = marginals
                .iter()
                .zip(&agent.q)
                .filter(|(&m, _)| m > 0.0)
                .map(|(&m, rows)| (m, rows.as_slice()))
                .collect();
            let before = marginals[..signal].iter().filter(|&&m| m > 0.0).count();
            (blocks, before * k)
        }
        (SignalMode::MultiSignal, None) => {
            return Err(Error::ConfigInvalid("multi-signal agent has no recommendation marginals".into()))
        }
        _ => (vec![(1.0, agent.q[signal].as_slice())], 0),
    };
    let best = maximize_utility_of_mixture(u, &blocks, d, cfg);
    if !best.value.is_finite() {
        return Err(Error::OptimizationFailed("strategy optimisation has non-finite value".into()));
    }
    MixedStrategy::new(best.point[offset..offset + k].to_vec()).map_err(|e| Error::OptimizationFailed(e.to_string()))
}

/// With probability `epsilon` a uniformly random action, otherwise a draw
/// from `strategy`.
///
/// Exactly two uniform numbers are consumed per call.
pub fn select_action<R: Rng + ?Sized>(strategy: &MixedStrategy, epsilon: f64, rng: &mut R) -> usize {
    let explore: f64 = rng.gen();
    let draw: f64 = rng.gen();
    let k = strategy.len();
    if explore < epsilon {
        return ((draw * k as f64) as usize).min(k - 1);
    }
    sample_index(strategy.probs(), draw)
}

/// Index `j` with `cdf(j - 1) <= draw < cdf(j)`, skipping zero entries.
pub(crate) fn sample_index(probs: &[f64], draw: f64) -> usize {
    let mut acc = 0.0;
    let mut last = 0;
    for (j, &p) in probs.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        acc += p;
        last = j;
        if draw < acc {
            return j;
        }
    }
    last
}
