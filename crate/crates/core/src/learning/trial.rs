use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{optimal_mixed_strategy, sample_index, select_action, AgentState, ExperimentConfig, SignalMode};
use crate::{MixedStrategy, Result};

/// Per-episode record of one trial. Outer vectors are indexed by agent,
/// inner ones by episode (0-based).
#[derive(Debug, Clone, PartialEq)]
pub struct TrialTrace {
    pub trial_index: usize,
    pub seed: u64,
    pub actions: Vec<Vec<usize>>,
    /// Recommendations delivered to each agent (signal modes only).
    pub signals: Option<Vec<Vec<usize>>>,
    pub payoffs: Vec<Vec<Vec<f64>>>,
    pub scalarised: Vec<Vec<f64>>,
    /// Exploration rate in force during each episode.
    pub epsilon: Vec<f64>,
    /// Learner states after the final episode.
    pub agents: Vec<AgentState>,
}

/// Memo of the last optimisation per signal, keyed by the estimates it
/// was computed from.
struct StrategyCache {
    entries: Vec<Option<(Vec<Vec<Vec<f64>>>, MixedStrategy)>>,
}

impl StrategyCache {
    fn new(num_signals: usize) -> Self {
        StrategyCache {
            entries: vec![None; num_signals],
        }
    }

    fn strategy(
        &mut self,
        agent: &AgentState,
        cfg: &ExperimentConfig,
        player: usize,
        signal: usize,
    ) -> Result<&MixedStrategy> {
        let key: &[Vec<Vec<f64>>] = match cfg.signal_mode {
            SignalMode::MultiSignal => &agent.q,
            _ => std::slice::from_ref(&agent.q[signal]),
        };
        let fresh = matches!(&self.entries[signal], Some((k, _)) if k.as_slice() == key);
        if !fresh {
            let s = optimal_mixed_strategy(agent, &cfg.utilities[player], cfg.signal_mode, signal, &cfg.opt_config)?;
            self.entries[signal] = Some((key.to_vec(), s));
        }
        Ok(&self.entries[signal].as_ref().expect("entry was just filled").1)
    }
}

/// Plays one trial of `cfg.episodes` episodes with the generator seeded by
/// `cfg.base_seed + trial_index`.
///
/// In signal modes a joint recommendation is drawn every episode and each
/// agent sees its own component; the first `follow_episodes` episodes obey
/// the recommendations exactly, after which exploration restarts at
/// `epsilon_initial`. Exploration decays by `epsilon_decay` at the end of
/// every episode in which it is active. Every realised action updates the
/// estimate of its (signal, action) pair.
pub fn run_trial(cfg: &ExperimentConfig, trial_index: usize) -> Result<TrialTrace> {
    cfg.validate()?;
    let game = &cfg.game;
    let n = game.num_players();
    let d = game.num_objectives();
    let seed = cfg.trial_seed(trial_index);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let sigma = cfg.correlated_strategy.as_ref().filter(|_| cfg.signal_mode.uses_signals());
    let mut agents: Vec<AgentState> = (0..n)
        .map(|i| {
            let k = game.action_count(i);
            let signals = if sigma.is_some() { k } else { 1 };
            let agent = AgentState::new(signals, k, d, cfg.epsilon_initial);
            match (cfg.signal_mode, sigma) {
                (SignalMode::MultiSignal, Some(s)) => agent.with_marginals(s.marginal(game, i)),
                _ => agent,
            }
        })
        .collect();
    let mut caches: Vec<StrategyCache> = agents.iter().map(|a| StrategyCache::new(a.q.len())).collect();

    let episodes = cfg.episodes;
    let mut actions = vec![Vec::with_capacity(episodes); n];
    let mut signals = sigma.map(|_| vec![Vec::with_capacity(episodes); n]);
    let mut payoffs = vec![Vec::with_capacity(episodes); n];
    let mut scalarised = vec![Vec::with_capacity(episodes); n];
    let mut epsilon_trace = Vec::with_capacity(episodes);
    let follow = if sigma.is_some() { cfg.follow_episodes } else { 0 };
    let mut epsilon = cfg.epsilon_initial;
    let mut joint = vec![0; n];

    for episode in 0..episodes {
        let following = episode < follow;
        let recommendation = sigma.map(|s| game.joint_actions(sample_index(s.probs(), rng.gen())));
        for (i, agent) in agents.iter_mut().enumerate() {
            let signal = recommendation.as_ref().map_or(0, |r| r[i]);
            joint[i] = if following {
                signal
            } else {
                agent.epsilon = epsilon;
                let strategy = caches[i].strategy(agent, cfg, i, signal)?;
                select_action(strategy, epsilon, &mut rng)
            };
        }
        let j = game.joint_index(&joint);
        for (i, agent) in agents.iter_mut().enumerate() {
            let signal = recommendation.as_ref().map_or(0, |r| r[i]);
            let p = game.payoff_at(j, i);
            agent.observe(signal, joint[i], p, cfg.alpha)?;
            actions[i].push(joint[i]);
            if let Some(s) = signals.as_mut() {
                s[i].push(signal);
            }
            scalarised[i].push(cfg.utilities[i].eval_unchecked(p));
            payoffs[i].push(p.to_vec());
        }
        if following {
            epsilon_trace.push(0.0);
        } else {
            epsilon_trace.push(epsilon);
            epsilon *= cfg.epsilon_decay;
        }
    }
    Ok(TrialTrace {
        trial_index,
        seed,
        actions,
        signals,
        payoffs,
        scalarised,
        epsilon: epsilon_trace,
        agents,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn config(game: &str, mode: SignalMode, sigma: Option<&str>, episodes: usize) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(catalog::game(game).unwrap(), catalog::polysum_product().to_vec());
        if let Some(name) = sigma {
            cfg = cfg.with_signals(mode, catalog::correlated_strategy(name).unwrap());
        }
        cfg.episodes = episodes;
        cfg
    }

    #[test]
    fn follow_phase_obeys_recommendations() {
        let cfg = config("imbalancing", SignalMode::SingleSignal, Some("imbalancing_ce"), 700);
        let t = run_trial(&cfg, 0).unwrap();
        let signals = t.signals.as_ref().unwrap();
        for e in 0..500 {
            assert_eq!(t.actions[1][e], 1);
            assert!(t.actions[0][e] == 0 || t.actions[0][e] == 2);
            assert_eq!((t.actions[0][e], t.actions[1][e]), (signals[0][e], signals[1][e]));
            assert_eq!(t.epsilon[e], 0.0);
        }
        assert_eq!(t.epsilon[500], 0.1);
        assert_eq!(t.epsilon[501], 0.1 * 0.999);
    }

    #[test]
    fn epsilon_schedule_without_signals() {
        let cfg = config("game3", SignalMode::None, None, 50);
        let t = run_trial(&cfg, 0).unwrap();
        let mut expected = 0.1;
        for e in 0..50 {
            assert_eq!(t.epsilon[e], expected);
            expected *= 0.999;
        }
        assert!((t.epsilon[49] - 0.1 * 0.999f64.powi(49)).abs() < 1e-15);
        assert!(t.signals.is_none());
    }

    #[test]
    fn scalarised_trace_matches_payoffs() {
        let cfg = config("game3", SignalMode::MultiSignal, Some("game3_ce"), 800);
        let t = run_trial(&cfg, 3).unwrap();
        for i in 0..2 {
            for (p, s) in t.payoffs[i].iter().zip(&t.scalarised[i]) {
                assert_eq!(cfg.utilities[i].eval(p).unwrap(), *s);
            }
        }
        assert_eq!(t.seed, 3);
    }

    #[test]
    fn trials_are_reproducible() {
        let cfg = config("imbalancing", SignalMode::None, None, 300);
        assert_eq!(run_trial(&cfg, 5).unwrap(), run_trial(&cfg, 5).unwrap());
        assert_ne!(run_trial(&cfg, 5).unwrap().actions, run_trial(&cfg, 6).unwrap().actions);
    }
}
