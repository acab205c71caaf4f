//! Expected payoff vectors and the ESR / SER values built on them.
//!
//! All sums run over the joint-action table in row-major order.

use crate::game::{CorrelatedStrategy, Monfg, StrategyModification, StrategyProfile};
use crate::{Error, MixedStrategy, Result, UtilitySpec};

fn check_player(game: &Monfg, player: usize) -> Result<()> {
    if player >= game.num_players() {
        return Err(Error::ShapeMismatch(format!(
            "player {player} out of range for a {}-player game",
            game.num_players()
        )));
    }
    Ok(())
}

fn accumulate(acc: &mut [f64], weight: f64, p: &[f64]) {
    for (a, x) in acc.iter_mut().zip(p) {
        *a += weight * x;
    }
}

/// `E[p_i]` under independent mixed strategies.
pub fn expected_payoff_profile(game: &Monfg, profile: &StrategyProfile, player: usize) -> Result<Vec<f64>> {
    profile.check(game)?;
    check_player(game, player)?;
    let mut acc = vec![0.0; game.num_objectives()];
    for j in 0..game.num_joint() {
        let w = profile.joint_prob(game, j);
        if w != 0.0 {
            accumulate(&mut acc, w, game.payoff_at(j, player));
        }
    }
    Ok(acc)
}

/// `E[p_i]` under a joint distribution over action profiles.
pub fn expected_payoff_correlated(game: &Monfg, sigma: &CorrelatedStrategy, player: usize) -> Result<Vec<f64>> {
    sigma.check(game)?;
    check_player(game, player)?;
    let mut acc = vec![0.0; game.num_objectives()];
    for (j, &w) in sigma.probs().iter().enumerate() {
        if w != 0.0 {
            accumulate(&mut acc, w, game.payoff_at(j, player));
        }
    }
    Ok(acc)
}

/// `E[p_i]` when player `delta.player` replaces each recommendation `a` with
/// `delta(a)` and everyone else follows `sigma`.
pub fn expected_payoff_modified(
    game: &Monfg,
    sigma: &CorrelatedStrategy,
    delta: &StrategyModification,
) -> Result<Vec<f64>> {
    sigma.check(game)?;
    delta.check(game)?;
    let i = delta.player;
    let mut acc = vec![0.0; game.num_objectives()];
    for (j, &w) in sigma.probs().iter().enumerate() {
        if w != 0.0 {
            let played = game.with_action(j, i, delta.apply(game.action_of(j, i)));
            accumulate(&mut acc, w, game.payoff_at(played, i));
        }
    }
    Ok(acc)
}

/// Expected payoff of `player` given that `recommended` was delivered and
/// `response` is played, the others following `sigma`.
pub fn conditional_expected_payoff(
    game: &Monfg,
    sigma: &CorrelatedStrategy,
    player: usize,
    recommended: usize,
    response: usize,
) -> Result<Vec<f64>> {
    sigma.check(game)?;
    check_player(game, player)?;
    let k = game.action_count(player);
    if recommended >= k || response >= k {
        return Err(Error::ShapeMismatch(format!("action out of range for player {player}")));
    }
    let mut acc = vec![0.0; game.num_objectives()];
    let mut mass = 0.0;
    for (j, &w) in sigma.probs().iter().enumerate() {
        if w != 0.0 && game.action_of(j, player) == recommended {
            mass += w;
            accumulate(&mut acc, w, game.payoff_at(game.with_action(j, player, response), player));
        }
    }
    if mass <= 0.0 {
        return Err(Error::ZeroMarginal {
            player,
            action: recommended,
        });
    }
    acc.iter_mut().for_each(|x| *x /= mass);
    Ok(acc)
}

/// Expected payoff vector of each pure action of `player` against the
/// opponents' independent strategies (`opponents` omits `player`).
pub fn action_payoffs(game: &Monfg, opponents: &[MixedStrategy], player: usize) -> Result<Vec<Vec<f64>>> {
    check_player(game, player)?;
    let k = game.action_count(player);
    let base = StrategyProfile::from_opponents(player, MixedStrategy::uniform(k), opponents);
    base.check(game)?;
    let d = game.num_objectives();
    let mut rows = vec![vec![0.0; d]; k];
    for j in 0..game.num_joint() {
        let a = game.action_of(j, player);
        let w: f64 = (0..game.num_players())
            .filter(|&q| q != player)
            .map(|q| base.strategy(q).probs()[game.action_of(j, q)])
            .product();
        if w != 0.0 {
            accumulate(&mut rows[a], w, game.payoff_at(j, player));
        }
    }
    Ok(rows)
}

/// ESR value `E[u(p_i)]` under independent mixed strategies.
pub fn esr_value(game: &Monfg, profile: &StrategyProfile, player: usize, u: &UtilitySpec) -> Result<f64> {
    profile.check(game)?;
    check_player(game, player)?;
    u.eval(game.payoff_at(0, player))?;
    let mut acc = 0.0;
    for j in 0..game.num_joint() {
        let w = profile.joint_prob(game, j);
        if w != 0.0 {
            acc += w * u.eval_unchecked(game.payoff_at(j, player));
        }
    }
    Ok(acc)
}

/// ESR value `E[u(p_i)]` under a correlated strategy.
pub fn esr_value_correlated(
    game: &Monfg,
    sigma: &CorrelatedStrategy,
    player: usize,
    u: &UtilitySpec,
) -> Result<f64> {
    sigma.check(game)?;
    check_player(game, player)?;
    u.eval(game.payoff_at(0, player))?;
    let mut acc = 0.0;
    for (j, &w) in sigma.probs().iter().enumerate() {
        if w != 0.0 {
            acc += w * u.eval_unchecked(game.payoff_at(j, player));
        }
    }
    Ok(acc)
}

/// SER value `u(E[p_i])` under independent mixed strategies.
pub fn ser_value(game: &Monfg, profile: &StrategyProfile, player: usize, u: &UtilitySpec) -> Result<f64> {
    u.eval(&expected_payoff_profile(game, profile, player)?)
}
