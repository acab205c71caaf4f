use rayon::prelude::*;
use serde::Serialize;

use super::{best_response_ser, check_utilities};
use crate::game::{JointActions, Monfg, StrategyProfile};
use crate::optim::simplex::{simplex_grid, simplex_grid_size};
use crate::optim::OptConfig;
use crate::value::expected_payoff_profile;
use crate::{Error, MixedStrategy, Result, UtilitySpec};

#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub opt: OptConfig,
    /// Largest number of grid profiles a scan may enumerate.
    pub max_profiles: u128,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            opt: OptConfig::default(),
            max_profiles: 10_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridScanResult {
    pub resolution: usize,
    pub tolerance: f64,
    pub profiles_evaluated: usize,
    pub min_max_gain: f64,
    pub argmin_profile: StrategyProfile,
    pub approx_equilibria: Vec<StrategyProfile>,
}

/// Row-major enumeration of per-player grid indices over `sizes`.
fn decode(mut index: usize, sizes: &[usize], out: &mut [usize]) {
    for (slot, &s) in out.iter_mut().zip(sizes).rev() {
        *slot = index % s;
        index /= s;
    }
}

/// Evaluates the SER best-response gain of every profile on the lattice
/// `{c / resolution}` of each player's simplex.
///
/// Profiles are ordered lexicographically (player 0 most significant); the
/// first minimiser wins ties. A player's best-response value only depends
/// on the opponents, so it is computed once per opponent grid combination.
pub fn scan_ne_ser_grid(
    game: &Monfg,
    utilities: &[UtilitySpec],
    resolution: usize,
    tol: f64,
    cfg: &ScanConfig,
) -> Result<GridScanResult> {
    check_utilities(game, utilities)?;
    if resolution == 0 {
        return Err(Error::parse("resolution", "must be positive"));
    }
    let n = game.num_players();
    let total: u128 = (0..n)
        .map(|i| simplex_grid_size(game.action_count(i), resolution))
        .try_fold(1u128, |acc, s| acc.checked_mul(s))
        .unwrap_or(u128::MAX);
    if total > cfg.max_profiles {
        return Err(Error::GridTooLarge {
            profiles: total,
            cap: cfg.max_profiles,
        });
    }
    let grids: Vec<Vec<MixedStrategy>> = (0..n)
        .map(|i| {
            simplex_grid(game.action_count(i), resolution)
                .into_iter()
                .map(|p| MixedStrategy::new(p).expect("lattice points are distributions"))
                .collect()
        })
        .collect();
    let sizes: Vec<usize> = grids.iter().map(Vec::len).collect();

    // best-response value of player i for each combination of opponent grid points
    let mut best_values: Vec<Vec<f64>> = Vec::with_capacity(n);
    for (i, u) in utilities.iter().enumerate() {
        let opp_sizes: Vec<usize> = (0..n).filter(|&j| j != i).map(|j| sizes[j]).collect();
        let combos: Vec<Vec<usize>> = JointActions::new(&opp_sizes).collect();
        let values = combos
            .par_iter()
            .map(|combo| {
                let opponents: Vec<MixedStrategy> = (0..n)
                    .filter(|&j| j != i)
                    .zip(combo)
                    .map(|(j, &c)| grids[j][c].clone())
                    .collect();
                best_response_ser(game, u, &opponents, i, &cfg.opt).map(|(_, v)| v)
            })
            .collect::<Result<Vec<f64>>>()?;
        best_values.push(values);
    }

    let count = total as usize;
    let gains: Vec<f64> = (0..count)
        .into_par_iter()
        .map(|index| {
            let mut idx = vec![0; n];
            decode(index, &sizes, &mut idx);
            let profile = StrategyProfile::new((0..n).map(|i| grids[i][idx[i]].clone()).collect());
            let mut worst = 0.0f64;
            for (i, u) in utilities.iter().enumerate() {
                let e = expected_payoff_profile(game, &profile, i).expect("grid profile matches game");
                let value = u.eval_unchecked(&e);
                let mut opp = 0;
                for j in (0..n).filter(|&j| j != i) {
                    opp = opp * sizes[j] + idx[j];
                }
                worst = worst.max(best_values[i][opp] - value);
            }
            worst
        })
        .collect();

    let profile_at = |index: usize| {
        let mut idx = vec![0; n];
        decode(index, &sizes, &mut idx);
        StrategyProfile::new((0..n).map(|i| grids[i][idx[i]].clone()).collect())
    };
    let mut argmin = 0;
    for (index, &g) in gains.iter().enumerate() {
        if g < gains[argmin] {
            argmin = index;
        }
    }
    let approx_equilibria = gains
        .iter()
        .enumerate()
        .filter(|(_, &g)| g <= tol)
        .map(|(index, _)| profile_at(index))
        .collect();
    Ok(GridScanResult {
        resolution,
        tolerance: tol,
        profiles_evaluated: count,
        min_max_gain: gains[argmin],
        argmin_profile: profile_at(argmin),
        approx_equilibria,
    })
}
