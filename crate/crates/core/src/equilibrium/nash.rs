use super::{check_utilities, Concept, Deviation, EquilibriumReport, PlayerReport};
use crate::game::{Monfg, StrategyProfile};
use crate::optim::{maximize_utility_of_mixture, OptConfig};
use crate::value::{action_payoffs, esr_value, expected_payoff_profile};
use crate::{Error, MixedStrategy, Result, UtilitySpec};

/// Nash check under ESR. Pure deviations suffice: the ESR value is linear in
/// the deviating player's own mixing probabilities.
pub fn verify_ne_esr(
    game: &Monfg,
    utilities: &[UtilitySpec],
    profile: &StrategyProfile,
    tol: f64,
) -> Result<EquilibriumReport> {
    profile.check(game)?;
    check_utilities(game, utilities)?;
    let mut players = Vec::with_capacity(game.num_players());
    for (i, u) in utilities.iter().enumerate() {
        let value = esr_value(game, profile, i, u)?;
        let mut best = (f64::NEG_INFINITY, 0);
        for a in 0..game.action_count(i) {
            let dev = profile.with_strategy(i, MixedStrategy::pure(game.action_count(i), a));
            let v = esr_value(game, &dev, i, u)?;
            if v > best.0 {
                best = (v, a);
            }
        }
        players.push(PlayerReport {
            max_gain: best.0 - value,
            witness: Deviation::Pure { action: best.1 },
            value,
        });
    }
    Ok(EquilibriumReport::new(Concept::NeEsr, tol, players))
}

/// Best SER response of `player` to fixed opponents (`opponents` lists the
/// strategies of every other player in order).
///
/// The attainable expected vectors form the convex hull of the pure-action
/// expected vectors, so the search runs over the player's simplex: all
/// vertices, then seeded multi-start projected-gradient ascent.
pub fn best_response_ser(
    game: &Monfg,
    u: &UtilitySpec,
    opponents: &[MixedStrategy],
    player: usize,
    cfg: &OptConfig,
) -> Result<(MixedStrategy, f64)> {
    let rows = action_payoffs(game, opponents, player)?;
    u.eval(&rows[0])?;
    let best = maximize_utility_of_mixture(u, &[(1.0, &rows)], game.num_objectives(), cfg);
    if !best.value.is_finite() {
        return Err(Error::OptimizationFailed(format!(
            "best response of player {player} has non-finite value"
        )));
    }
    let strategy = MixedStrategy::new(best.point).map_err(|e| Error::OptimizationFailed(e.to_string()))?;
    Ok((strategy, best.value))
}

/// Nash check under SER against arbitrary mixed deviations.
///
/// Pure deviations are always evaluated exactly; interior deviations are as
/// good as the optimiser configured by `cfg`, which the report records.
pub fn verify_ne_ser(
    game: &Monfg,
    utilities: &[UtilitySpec],
    profile: &StrategyProfile,
    tol: f64,
    cfg: &OptConfig,
) -> Result<EquilibriumReport> {
    profile.check(game)?;
    check_utilities(game, utilities)?;
    let mut players = Vec::with_capacity(game.num_players());
    for (i, u) in utilities.iter().enumerate() {
        let value = u.eval(&expected_payoff_profile(game, profile, i)?)?;
        let (strategy, br) = best_response_ser(game, u, &profile.opponents(i), i, cfg)?;
        let (max_gain, witness) = if br > value {
            (br - value, strategy)
        } else {
            (0.0, profile.strategy(i).clone())
        };
        let witness = match witness.pure_action() {
            Some(action) => Deviation::Pure { action },
            None => Deviation::Mixed {
                probs: witness.probs().to_vec(),
            },
        };
        players.push(PlayerReport {
            max_gain,
            witness,
            value,
        });
    }
    let mut report = EquilibriumReport::new(Concept::NeSer, tol, players);
    report.opt_config = Some(cfg.clone());
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn utils() -> Vec<UtilitySpec> {
        catalog::polysum_product().to_vec()
    }

    #[test]
    fn chicken_pure_ne() {
        let g = catalog::game("chicken").unwrap();
        let ids = catalog::utility_pair("identity").unwrap();
        let r = verify_ne_esr(&g, &ids, &StrategyProfile::pure(&g, &[1, 0]), 1e-6).unwrap();
        assert!(r.verdict);
        let r = verify_ne_esr(&g, &ids, &StrategyProfile::pure(&g, &[1, 1]), 1e-6).unwrap();
        assert!(!r.verdict);
    }

    #[test]
    fn imbalancing_mixed_profile() {
        let g = catalog::game("imbalancing").unwrap();
        let pi = catalog::profile("imbalancing_esr_ne").unwrap();
        let esr = verify_ne_esr(&g, &utils(), &pi, 1e-6).unwrap();
        assert!(esr.verdict);
        assert_eq!(esr.players[0].value, 10.0);
        assert_eq!(esr.players[1].value, 3.0);

        let ser = verify_ne_ser(&g, &utils(), &pi, 1e-6, &OptConfig::default()).unwrap();
        assert!(!ser.verdict);
        assert_eq!(ser.players[0].max_gain, 2.0);
        assert_eq!(ser.players[0].value, 8.0);
        assert!(matches!(ser.players[0].witness, Deviation::Pure { action: 0 | 2 }));
        assert!(ser.opt_config.is_some());
    }

    #[test]
    fn imbalancing_pure_ll_not_esr_ne() {
        let g = catalog::game("imbalancing").unwrap();
        let r = verify_ne_esr(&g, &utils(), &StrategyProfile::pure(&g, &[0, 0]), 1e-6).unwrap();
        assert!(!r.verdict);
        // column player: f2(L,L) = 0, f2(L,M) = 3, f2(L,R) = 4
        assert_eq!(r.players[1].max_gain, 4.0);
        assert_eq!(r.players[1].witness, Deviation::Pure { action: 2 });
    }

    #[test]
    fn game3_pure_profiles_under_ser() {
        let g = catalog::game("game3").unwrap();
        let cfg = OptConfig::default();
        let mm = verify_ne_ser(&g, &utils(), &StrategyProfile::pure(&g, &[1, 1]), 1e-6, &cfg).unwrap();
        assert!(mm.verdict);
        assert_eq!((mm.players[0].value, mm.players[1].value), (13.0, 6.0));

        // Against row L the column player's expected vector under (1-t)L + tM
        // is [4-3t, 1+t]; the product peaks at t = 1/6 with 49/12 > 4.
        let ll = verify_ne_ser(&g, &utils(), &StrategyProfile::pure(&g, &[0, 0]), 1e-6, &cfg).unwrap();
        assert_eq!((ll.players[0].value, ll.players[1].value), (17.0, 4.0));
        assert_eq!(ll.players[0].max_gain, 0.0);
        assert!((ll.players[1].max_gain - 1.0 / 12.0).abs() < 1e-6);
        assert!(!ll.verdict);

        // Against row R: [1+t, 3-2t] peaks at t = 1/4 with 25/8 > 3.
        let rr = verify_ne_ser(&g, &utils(), &StrategyProfile::pure(&g, &[2, 2]), 1e-6, &cfg).unwrap();
        assert!((rr.players[1].max_gain - 1.0 / 8.0).abs() < 1e-6, "{rr:?}");
    }

    #[test]
    fn best_response_examples() {
        let g = catalog::game("imbalancing").unwrap();
        let [u1, u2] = catalog::polysum_product();
        let cfg = OptConfig::default();
        let (s, v) = best_response_ser(&g, &u1, &[MixedStrategy::pure(3, 1)], 0, &cfg).unwrap();
        assert_eq!(v, 10.0);
        assert!(s.pure_action() == Some(0) || s.pure_action() == Some(2));

        let row = MixedStrategy::new(vec![0.75, 0.0, 0.25]).unwrap();
        let (_, v) = best_response_ser(&g, &u2, &[row], 1, &cfg).unwrap();
        // vectors [3.5,.5], [2.5,1.5], [1.5,2.5]: the best mixture of M and R
        // reaches [2,2] with product 4
        assert!((v - 4.0).abs() < 1e-7, "{v}");

        let lin = UtilitySpec::linear(vec![0.3, 0.7]).unwrap();
        let (s, _) = best_response_ser(&g, &lin, &[MixedStrategy::uniform(3)], 0, &cfg).unwrap();
        assert!(s.pure_action().is_some());
    }
}
