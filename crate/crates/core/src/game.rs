//! Game, strategy and deviation types.
//!
//! Joint actions are addressed by a row-major index: player 0's action is the
//! most significant digit. Every expectation in the crate walks the joint
//! table in this order, so results are bit-reproducible.

use serde::{Deserialize, Serialize};

use crate::{Error, Result, PROB_SUM_TOL};

/// An n-player, d-objective normal-form game with a complete payoff table.
///
/// Payoffs are stored flat as `[joint][player][objective]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Monfg {
    num_objectives: usize,
    action_labels: Vec<Vec<String>>,
    strides: Vec<usize>,
    num_joint: usize,
    payoffs: Vec<f64>,
}

impl Monfg {
    /// Builds a game from a flat `[joint][player][objective]` payoff buffer.
    pub fn new(
        action_labels: Vec<Vec<String>>,
        num_objectives: usize,
        payoffs: Vec<f64>,
    ) -> Result<Self> {
        let n = action_labels.len();
        if n < 2 {
            return Err(Error::InvalidGame(format!("need at least 2 players, got {n}")));
        }
        if num_objectives == 0 {
            return Err(Error::InvalidGame("need at least 1 objective".into()));
        }
        for (i, labels) in action_labels.iter().enumerate() {
            if labels.is_empty() {
                return Err(Error::InvalidGame(format!("player {i} has no actions")));
            }
        }
        let counts: Vec<usize> = action_labels.iter().map(Vec::len).collect();
        let mut strides = vec![1; n];
        for i in (0..n - 1).rev() {
            strides[i] = strides[i + 1] * counts[i + 1];
        }
        let num_joint = strides[0] * counts[0];
        let expected = num_joint * n * num_objectives;
        if payoffs.len() != expected {
            return Err(Error::InvalidGame(format!(
                "payoff table has {} entries, expected {expected}",
                payoffs.len()
            )));
        }
        if let Some(pos) = payoffs.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidGame(format!("non-finite payoff at flat index {pos}")));
        }
        Ok(Monfg {
            num_objectives,
            action_labels,
            strides,
            num_joint,
            payoffs,
        })
    }

    /// Builds a game by calling `f` on every joint action (row-major order).
    /// `f` returns one payoff vector per player.
    pub fn from_fn<F>(action_labels: Vec<Vec<String>>, num_objectives: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(&[usize]) -> Vec<Vec<f64>>,
    {
        let counts: Vec<usize> = action_labels.iter().map(Vec::len).collect();
        let n = counts.len();
        let mut payoffs = Vec::new();
        for joint in JointActions::new(&counts) {
            let entry = f(&joint);
            if entry.len() != n || entry.iter().any(|p| p.len() != num_objectives) {
                return Err(Error::InvalidGame(format!(
                    "payoff entry at {joint:?} must hold {n} vectors of length {num_objectives}"
                )));
            }
            payoffs.extend(entry.into_iter().flatten());
        }
        Monfg::new(action_labels, num_objectives, payoffs)
    }

    pub fn num_players(&self) -> usize {
        self.action_labels.len()
    }

    pub fn num_objectives(&self) -> usize {
        self.num_objectives
    }

    pub fn action_count(&self, player: usize) -> usize {
        self.action_labels[player].len()
    }

    pub fn action_counts(&self) -> Vec<usize> {
        self.action_labels.iter().map(Vec::len).collect()
    }

    pub fn action_labels(&self) -> &[Vec<String>] {
        &self.action_labels
    }

    /// Number of joint actions, the product of the per-player action counts.
    pub fn num_joint(&self) -> usize {
        self.num_joint
    }

    pub fn joint_index(&self, actions: &[usize]) -> usize {
        debug_assert_eq!(actions.len(), self.num_players());
        actions.iter().zip(&self.strides).map(|(a, s)| a * s).sum()
    }

    pub fn joint_actions(&self, index: usize) -> Vec<usize> {
        self.strides
            .iter()
            .zip(self.action_labels.iter())
            .map(|(s, labels)| (index / s) % labels.len())
            .collect()
    }

    /// Action of `player` inside the joint action `index`.
    pub fn action_of(&self, index: usize, player: usize) -> usize {
        (index / self.strides[player]) % self.action_count(player)
    }

    /// Joint index obtained by replacing `player`'s action in `index`.
    pub fn with_action(&self, index: usize, player: usize, action: usize) -> usize {
        let current = self.action_of(index, player);
        index - current * self.strides[player] + action * self.strides[player]
    }

    /// Payoff vector of `player` at the joint action with index `joint`.
    pub fn payoff_at(&self, joint: usize, player: usize) -> &[f64] {
        let d = self.num_objectives;
        let start = (joint * self.num_players() + player) * d;
        &self.payoffs[start..start + d]
    }

    pub fn payoff(&self, actions: &[usize], player: usize) -> &[f64] {
        self.payoff_at(self.joint_index(actions), player)
    }

    /// Human-readable label of a joint action, e.g. `L,M`.
    pub fn joint_label(&self, joint: usize) -> String {
        self.joint_actions(joint)
            .iter()
            .enumerate()
            .map(|(i, &a)| self.action_labels[i][a].as_str())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub(crate) fn raw_payoffs(&self) -> &[f64] {
        &self.payoffs
    }
}

/// Row-major iterator over all joint actions for the given action counts.
#[derive(Debug, Clone)]
pub struct JointActions {
    counts: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl JointActions {
    pub fn new(counts: &[usize]) -> Self {
        let next = if counts.iter().all(|&c| c > 0) {
            Some(vec![0; counts.len()])
        } else {
            None
        };
        JointActions {
            counts: counts.to_vec(),
            next,
        }
    }
}

impl Iterator for JointActions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        for pos in (0..succ.len()).rev() {
            succ[pos] += 1;
            if succ[pos] < self.counts[pos] {
                self.next = Some(succ);
                return Some(current);
            }
            succ[pos] = 0;
        }
        Some(current)
    }
}

fn check_distribution(probs: &[f64], what: &str) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::InvalidStrategy(format!("{what} is empty")));
    }
    for (k, &p) in probs.iter().enumerate() {
        if !p.is_finite() || !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidStrategy(format!("{what}: entry {k} = {p} is outside [0, 1]")));
        }
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > PROB_SUM_TOL {
        return Err(Error::InvalidStrategy(format!("{what}: probabilities sum to {sum}, not 1")));
    }
    Ok(())
}

/// A probability distribution over one player's actions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct MixedStrategy(Vec<f64>);

impl MixedStrategy {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        check_distribution(&probs, "mixed strategy")?;
        Ok(MixedStrategy(probs))
    }

    pub fn pure(num_actions: usize, action: usize) -> Self {
        assert!(action < num_actions, "action {action} out of range");
        let mut probs = vec![0.0; num_actions];
        probs[action] = 1.0;
        MixedStrategy(probs)
    }

    pub fn uniform(num_actions: usize) -> Self {
        MixedStrategy(vec![1.0 / num_actions as f64; num_actions])
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Index of the action with probability one, if the strategy is pure.
    pub fn pure_action(&self) -> Option<usize> {
        self.0.iter().position(|&p| p == 1.0)
    }
}

impl TryFrom<Vec<f64>> for MixedStrategy {
    type Error = Error;

    fn try_from(probs: Vec<f64>) -> Result<Self> {
        MixedStrategy::new(probs)
    }
}

impl From<MixedStrategy> for Vec<f64> {
    fn from(s: MixedStrategy) -> Vec<f64> {
        s.0
    }
}

/// One independent mixed strategy per player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StrategyProfile(Vec<MixedStrategy>);

impl StrategyProfile {
    pub fn new(strategies: Vec<MixedStrategy>) -> Self {
        StrategyProfile(strategies)
    }

    pub fn pure(game: &Monfg, actions: &[usize]) -> Self {
        StrategyProfile(
            actions
                .iter()
                .enumerate()
                .map(|(i, &a)| MixedStrategy::pure(game.action_count(i), a))
                .collect(),
        )
    }

    pub fn strategies(&self) -> &[MixedStrategy] {
        &self.0
    }

    pub fn strategy(&self, player: usize) -> &MixedStrategy {
        &self.0[player]
    }

    /// Copy of the profile with `player`'s strategy replaced.
    pub fn with_strategy(&self, player: usize, strategy: MixedStrategy) -> Self {
        let mut next = self.0.clone();
        next[player] = strategy;
        StrategyProfile(next)
    }

    /// Strategies of every player except `player`.
    pub fn opponents(&self, player: usize) -> Vec<MixedStrategy> {
        self.0
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != player)
            .map(|(_, s)| s.clone())
            .collect()
    }

    /// Rebuilds a full profile from `player`'s strategy and the others'.
    pub fn from_opponents(player: usize, own: MixedStrategy, opponents: &[MixedStrategy]) -> Self {
        let mut all = opponents.to_vec();
        all.insert(player, own);
        StrategyProfile(all)
    }

    pub fn check(&self, game: &Monfg) -> Result<()> {
        if self.0.len() != game.num_players() {
            return Err(Error::ShapeMismatch(format!(
                "profile has {} strategies for {} players",
                self.0.len(),
                game.num_players()
            )));
        }
        for (i, s) in self.0.iter().enumerate() {
            if s.len() != game.action_count(i) {
                return Err(Error::ShapeMismatch(format!(
                    "player {i} strategy has {} entries, game has {} actions",
                    s.len(),
                    game.action_count(i)
                )));
            }
        }
        Ok(())
    }

    /// Probability of the joint action with index `joint`.
    pub fn joint_prob(&self, game: &Monfg, joint: usize) -> f64 {
        self.0
            .iter()
            .enumerate()
            .map(|(i, s)| s.0[game.action_of(joint, i)])
            .product()
    }
}

/// A joint distribution over action profiles, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatedStrategy {
    shape: Vec<usize>,
    probs: Vec<f64>,
}

impl CorrelatedStrategy {
    pub fn new(shape: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        let size: usize = shape.iter().product();
        if shape.is_empty() || size != probs.len() {
            return Err(Error::InvalidStrategy(format!(
                "correlated strategy of shape {shape:?} needs {size} entries, got {}",
                probs.len()
            )));
        }
        check_distribution(&probs, "correlated strategy")?;
        Ok(CorrelatedStrategy { shape, probs })
    }

    /// Builds a correlated strategy by listing the joint actions with mass.
    pub fn from_entries(game: &Monfg, entries: &[(&[usize], f64)]) -> Result<Self> {
        let mut probs = vec![0.0; game.num_joint()];
        for (actions, p) in entries {
            probs[game.joint_index(actions)] += p;
        }
        CorrelatedStrategy::new(game.action_counts(), probs)
    }

    pub fn point_mass(game: &Monfg, actions: &[usize]) -> Self {
        let mut probs = vec![0.0; game.num_joint()];
        probs[game.joint_index(actions)] = 1.0;
        CorrelatedStrategy {
            shape: game.action_counts(),
            probs,
        }
    }

    /// Product distribution induced by independent mixed strategies.
    pub fn from_profile(game: &Monfg, profile: &StrategyProfile) -> Result<Self> {
        profile.check(game)?;
        let probs: Vec<f64> = (0..game.num_joint()).map(|j| profile.joint_prob(game, j)).collect();
        // the product of distributions is a distribution up to rounding
        let sum: f64 = probs.iter().sum();
        CorrelatedStrategy::new(game.action_counts(), probs.iter().map(|p| p / sum).collect())
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, joint: usize) -> f64 {
        self.probs[joint]
    }

    pub fn check(&self, game: &Monfg) -> Result<()> {
        if self.shape != game.action_counts() {
            return Err(Error::ShapeMismatch(format!(
                "correlated strategy shape {:?} does not match action counts {:?}",
                self.shape,
                game.action_counts()
            )));
        }
        Ok(())
    }

    /// Marginal distribution of `player`'s recommendations.
    pub fn marginal(&self, game: &Monfg, player: usize) -> Vec<f64> {
        let mut m = vec![0.0; game.action_count(player)];
        for (j, &p) in self.probs.iter().enumerate() {
            m[game.action_of(j, player)] += p;
        }
        m
    }
}

/// A map from a player's recommended action to the action actually played.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyModification {
    pub player: usize,
    pub map: Vec<usize>,
}

impl StrategyModification {
    pub fn new(player: usize, map: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = map.iter().find(|&&a| a >= map.len()) {
            return Err(Error::InvalidStrategy(format!(
                "modification maps to action {bad}, outside 0..{}",
                map.len()
            )));
        }
        Ok(StrategyModification { player, map })
    }

    pub fn identity(player: usize, num_actions: usize) -> Self {
        StrategyModification {
            player,
            map: (0..num_actions).collect(),
        }
    }

    /// Plays `to` whenever `from` is recommended, follows otherwise.
    pub fn swap(player: usize, num_actions: usize, from: usize, to: usize) -> Self {
        let mut m = StrategyModification::identity(player, num_actions);
        m.map[from] = to;
        m
    }

    pub fn apply(&self, action: usize) -> usize {
        self.map[action]
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(a, &b)| a == b)
    }

    pub fn check(&self, game: &Monfg) -> Result<()> {
        if self.player >= game.num_players() {
            return Err(Error::ShapeMismatch(format!("no player {}", self.player)));
        }
        if self.map.len() != game.action_count(self.player) {
            return Err(Error::ShapeMismatch(format!(
                "modification covers {} actions, player {} has {}",
                self.map.len(),
                self.player,
                game.action_count(self.player)
            )));
        }
        Ok(())
    }

    /// All `k^k` pure modifications of a player with `k` actions, in
    /// lexicographic order of their maps.
    pub fn enumerate(player: usize, num_actions: usize) -> impl Iterator<Item = StrategyModification> {
        JointActions::new(&vec![num_actions; num_actions]).map(move |map| StrategyModification { player, map })
    }
}
