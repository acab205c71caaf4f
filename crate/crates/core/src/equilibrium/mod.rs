//! Equilibrium verification under ESR and SER.
//!
//! Every verifier returns an [`EquilibriumReport`]: per player, the largest
//! utility gain any admissible deviation achieves, together with the
//! deviation that achieves it. A candidate is an equilibrium when no gain
//! exceeds the tolerance.

mod correlated;
mod nash;
mod scan;
mod solve;

use serde::{Deserialize, Serialize};

use crate::game::Monfg;
use crate::optim::OptConfig;
use crate::{Error, Result, UtilitySpec};

pub use correlated::{conditional_ser_table, verify_ce_esr, verify_ce_ser_multi, verify_ce_ser_single, MAX_MODIFICATIONS};
pub use nash::{best_response_ser, verify_ne_esr, verify_ne_ser};
pub use scan::{scan_ne_ser_grid, GridScanResult, ScanConfig};
pub use solve::{solve_ce_esr, CeObjective};

/// Default deviation tolerance for analytic verification.
pub const DEFAULT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Concept {
    NeEsr,
    NeSer,
    CeEsr,
    CeSerSingle,
    CeSerMulti,
}

impl std::str::FromStr for Concept {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "ne-esr" => Concept::NeEsr,
            "ne-ser" => Concept::NeSer,
            "ce-esr" => Concept::CeEsr,
            "ce-ser-single" => Concept::CeSerSingle,
            "ce-ser-multi" => Concept::CeSerMulti,
            other => return Err(Error::parse("concept", format!("unknown concept `{other}`"))),
        })
    }
}

impl Concept {
    /// True for concepts whose candidates are correlated strategies.
    pub fn is_correlated(self) -> bool {
        matches!(self, Concept::CeEsr | Concept::CeSerSingle | Concept::CeSerMulti)
    }
}

/// The deviation achieving a player's reported gain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Deviation {
    /// Play this pure action instead of the candidate strategy.
    Pure { action: usize },
    /// Play this mixed strategy instead of the candidate strategy.
    Mixed { probs: Vec<f64> },
    /// Replace each recommendation `a` with `map[a]`.
    Modification { map: Vec<usize> },
    /// Answer the recommendation `recommended` with `response`.
    Recommendation { recommended: usize, response: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerReport {
    pub max_gain: f64,
    pub witness: Deviation,
    /// The player's value at the candidate under the concept's criterion.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub concept: Concept,
    pub verdict: bool,
    pub tolerance: f64,
    pub players: Vec<PlayerReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub opt_config: Option<OptConfig>,
}

impl EquilibriumReport {
    fn new(concept: Concept, tolerance: f64, players: Vec<PlayerReport>) -> Self {
        let verdict = players.iter().all(|p| p.max_gain <= tolerance);
        EquilibriumReport {
            concept,
            verdict,
            tolerance,
            players,
            opt_config: None,
        }
    }

    /// Largest gain over all players.
    pub fn max_gain(&self) -> f64 {
        self.players.iter().map(|p| p.max_gain).fold(f64::NEG_INFINITY, f64::max)
    }
}

pub(crate) fn check_utilities(game: &Monfg, utilities: &[UtilitySpec]) -> Result<()> {
    if utilities.len() != game.num_players() {
        return Err(Error::ArityMismatch {
            expected: game.num_players(),
            actual: utilities.len(),
        });
    }
    for (i, u) in utilities.iter().enumerate() {
        u.eval(game.payoff_at(0, i))?;
    }
    Ok(())
}

/// The scalar "trade-off" game with payoffs `f_i(a) = u_i(p_i(a))`.
pub fn tradeoff_game(game: &Monfg, utilities: &[UtilitySpec]) -> Result<Monfg> {
    check_utilities(game, utilities)?;
    let n = game.num_players();
    let mut payoffs = Vec::with_capacity(game.num_joint() * n);
    for j in 0..game.num_joint() {
        for (i, u) in utilities.iter().enumerate() {
            payoffs.push(u.eval(game.payoff_at(j, i))?);
        }
    }
    Monfg::new(game.action_labels().to_vec(), 1, payoffs)
}
