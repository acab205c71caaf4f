use super::{check_utilities, Concept, Deviation, EquilibriumReport, PlayerReport};
use crate::game::{CorrelatedStrategy, Monfg, StrategyModification};
use crate::value::{conditional_expected_payoff, esr_value_correlated, expected_payoff_correlated, expected_payoff_modified};
use crate::{Error, Result, UtilitySpec};

/// Cap on `|A_i|^|A_i|` for the multi-signal enumeration.
pub const MAX_MODIFICATIONS: u128 = 1_000_000;

/// CE check under ESR on the trade-off game. Because the ESR objective is
/// linear in `sigma`, the pairwise swaps `a -> a'` cover every strategy
/// modification.
pub fn verify_ce_esr(
    game: &Monfg,
    utilities: &[UtilitySpec],
    sigma: &CorrelatedStrategy,
    tol: f64,
) -> Result<EquilibriumReport> {
    sigma.check(game)?;
    check_utilities(game, utilities)?;
    let mut players = Vec::with_capacity(game.num_players());
    for (i, u) in utilities.iter().enumerate() {
        let k = game.action_count(i);
        let f = |j: usize| u.eval_unchecked(game.payoff_at(j, i));
        // gains[a][b]: change in ESR value when recommendation a is answered with b
        let mut gains = vec![vec![0.0; k]; k];
        for (j, &w) in sigma.probs().iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let a = game.action_of(j, i);
            let here = f(j);
            for (b, g) in gains[a].iter_mut().enumerate() {
                if b != a {
                    *g += w * (f(game.with_action(j, i, b)) - here);
                }
            }
        }
        let mut best = (0.0, 0, 0);
        for (a, row) in gains.iter().enumerate() {
            for (b, &g) in row.iter().enumerate() {
                if g > best.0 {
                    best = (g, a, b);
                }
            }
        }
        let (max_gain, from, to) = best;
        players.push(PlayerReport {
            max_gain,
            witness: Deviation::Modification {
                map: StrategyModification::swap(i, k, from, to).map,
            },
            value: esr_value_correlated(game, sigma, i, u)?,
        });
    }
    Ok(EquilibriumReport::new(Concept::CeEsr, tol, players))
}

/// SER values `u_i(E[p_i | recommended, response])` indexed
/// `[recommended][response]`; `None` where the recommendation never occurs.
pub fn conditional_ser_table(
    game: &Monfg,
    u: &UtilitySpec,
    sigma: &CorrelatedStrategy,
    player: usize,
) -> Result<Vec<Option<Vec<f64>>>> {
    sigma.check(game)?;
    let k = game.action_count(player);
    let marginal = sigma.marginal(game, player);
    (0..k)
        .map(|rec| {
            if marginal[rec] <= 0.0 {
                return Ok(None);
            }
            (0..k)
                .map(|resp| u.eval(&conditional_expected_payoff(game, sigma, player, rec, resp)?))
                .collect::<Result<Vec<_>>>()
                .map(Some)
        })
        .collect()
}

/// Single-signal CE check under SER: for every delivered recommendation, no
/// alternative action raises the utility of the conditional expectation.
/// Recommendations that are never delivered are skipped.
pub fn verify_ce_ser_single(
    game: &Monfg,
    utilities: &[UtilitySpec],
    sigma: &CorrelatedStrategy,
    tol: f64,
) -> Result<EquilibriumReport> {
    sigma.check(game)?;
    check_utilities(game, utilities)?;
    let mut players = Vec::with_capacity(game.num_players());
    for (i, u) in utilities.iter().enumerate() {
        let table = conditional_ser_table(game, u, sigma, i)?;
        let mut best: Option<(f64, usize, usize, f64)> = None;
        for (rec, row) in table.iter().enumerate() {
            let Some(row) = row else { continue };
            let follow = row[rec];
            for (resp, &v) in row.iter().enumerate() {
                let gain = v - follow;
                if best.map_or(true, |b| gain > b.0) {
                    best = Some((gain, rec, resp, follow));
                }
            }
        }
        let (max_gain, recommended, response, value) =
            best.ok_or_else(|| Error::InvalidStrategy(format!("player {i} receives no recommendation")))?;
        players.push(PlayerReport {
            max_gain,
            witness: Deviation::Recommendation { recommended, response },
            value,
        });
    }
    Ok(EquilibriumReport::new(Concept::CeSerSingle, tol, players))
}

/// Multi-signal CE check under SER: enumerates every pure strategy
/// modification and compares utilities of the marginalised expectations.
pub fn verify_ce_ser_multi(
    game: &Monfg,
    utilities: &[UtilitySpec],
    sigma: &CorrelatedStrategy,
    tol: f64,
) -> Result<EquilibriumReport> {
    sigma.check(game)?;
    check_utilities(game, utilities)?;
    for i in 0..game.num_players() {
        let k = game.action_count(i) as u128;
        let count = k.checked_pow(k as u32).unwrap_or(u128::MAX);
        if count > MAX_MODIFICATIONS {
            return Err(Error::TooManyModifications {
                count,
                cap: MAX_MODIFICATIONS,
            });
        }
    }
    let mut players = Vec::with_capacity(game.num_players());
    for (i, u) in utilities.iter().enumerate() {
        let value = u.eval(&expected_payoff_correlated(game, sigma, i)?)?;
        let mut best = (f64::NEG_INFINITY, StrategyModification::identity(i, game.action_count(i)));
        for delta in StrategyModification::enumerate(i, game.action_count(i)) {
            let v = u.eval(&expected_payoff_modified(game, sigma, &delta)?)?;
            if v > best.0 {
                best = (v, delta);
            }
        }
        players.push(PlayerReport {
            max_gain: best.0 - value,
            witness: Deviation::Modification { map: best.1.map },
            value,
        });
    }
    Ok(EquilibriumReport::new(Concept::CeSerMulti, tol, players))
}
