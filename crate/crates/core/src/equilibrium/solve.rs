use serde::{Deserialize, Serialize};

use super::{check_utilities, verify_ce_esr};
use crate::game::{CorrelatedStrategy, Monfg};
use crate::optim::{solve_lp, LinearProgram};
use crate::{Error, Result, UtilitySpec};

/// Re-verification tolerance applied to every LP solution.
const REVERIFY_TOL: f64 = 1e-7;

/// Linear objective over scalarised payoffs for [`solve_ce_esr`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CeObjective {
    Feasible,
    MaxUtilitySum,
    MaxPlayer(usize),
}

impl std::str::FromStr for CeObjective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "feasible" => Ok(CeObjective::Feasible),
            "max-sum" => Ok(CeObjective::MaxUtilitySum),
            _ => s
                .strip_prefix("max-player=")
                .and_then(|k| k.parse().ok())
                .map(CeObjective::MaxPlayer)
                .ok_or_else(|| Error::parse("objective", format!("unknown objective `{s}`"))),
        }
    }
}

/// Computes a correlated equilibrium under ESR by linear programming over
/// the joint-action simplex of the trade-off game.
///
/// The result is re-verified with [`verify_ce_esr`] before it is returned;
/// failures are reported as internal solver errors (a finite game always
/// has a correlated equilibrium).
pub fn solve_ce_esr(
    game: &Monfg,
    utilities: &[UtilitySpec],
    objective: CeObjective,
) -> Result<CorrelatedStrategy> {
    check_utilities(game, utilities)?;
    let n = game.num_players();
    let m = game.num_joint();
    if let CeObjective::MaxPlayer(k) = objective {
        if k >= n {
            return Err(Error::parse("objective", format!("no player {k}")));
        }
    }
    // f[j][i]: scalarised payoff of player i at joint action j
    let f: Vec<Vec<f64>> = (0..m)
        .map(|j| {
            utilities
                .iter()
                .enumerate()
                .map(|(i, u)| u.eval_unchecked(game.payoff_at(j, i)))
                .collect()
        })
        .collect();
    let costs: Vec<f64> = match objective {
        CeObjective::Feasible => vec![0.0; m],
        CeObjective::MaxUtilitySum => f.iter().map(|row| row.iter().sum()).collect(),
        CeObjective::MaxPlayer(k) => f.iter().map(|row| row[k]).collect(),
    };
    let mut lp = LinearProgram::new(costs).with_simplex();
    for i in 0..n {
        let k = game.action_count(i);
        for a in 0..k {
            for b in (0..k).filter(|&b| b != a) {
                let row = (0..m)
                    .map(|j| {
                        if game.action_of(j, i) == a {
                            f[j][i] - f[game.with_action(j, i, b)][i]
                        } else {
                            0.0
                        }
                    })
                    .collect();
                lp.ge.push((row, 0.0));
            }
        }
    }
    let solution = solve_lp(&lp).map_err(|e| match e {
        Error::Infeasible | Error::Unbounded => Error::Solver(format!("correlated equilibrium LP: {e}")),
        other => other,
    })?;
    let total: f64 = solution.x.iter().sum();
    let probs = solution.x.iter().map(|p| p / total).collect();
    let sigma = CorrelatedStrategy::new(game.action_counts(), probs)
        .map_err(|e| Error::Solver(format!("LP solution is not a distribution: {e}")))?;
    let report = verify_ce_esr(game, utilities, &sigma, REVERIFY_TOL)?;
    if !report.verdict {
        return Err(Error::Solver(format!(
            "LP solution fails re-verification (gain {:.3e})",
            report.max_gain()
        )));
    }
    Ok(sigma)
}
