//! Simplex-constrained maximisation and linear programming primitives.

mod lp;
pub(crate) mod simplex;

use std::cell::RefCell;

use serde::{Deserialize, Serialize};

use crate::UtilitySpec;

pub use lp::{solve_lp, LinearProgram, LpSolution};
pub use simplex::{maximize_over_simplex, maximize_over_simplices, project_to_simplex, SimplexMax};

/// Settings of the multi-start projected-gradient optimiser.
///
/// The optimiser is deterministic given `seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptConfig {
    pub num_starts: usize,
    pub max_iters: usize,
    pub step_init: f64,
    pub eps_opt: f64,
    pub seed: u64,
}

impl Default for OptConfig {
    fn default() -> Self {
        OptConfig {
            num_starts: 16,
            max_iters: 500,
            step_init: 0.1,
            eps_opt: 1e-7,
            seed: 0,
        }
    }
}

impl OptConfig {
    pub fn validate(&self) -> crate::Result<()> {
        if self.num_starts == 0 || self.max_iters == 0 || !(self.step_init > 0.0) || !(self.eps_opt > 0.0) {
            return Err(crate::Error::ConfigInvalid(
                "optimizer settings must all be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Maximises `u(sum_b w_b * sum_a x_b[a] * rows_b[a])` over one simplex per
/// block `(w_b, rows_b)`, where every row is a payoff vector of length `d`.
///
/// The point of the result is the concatenation of the block distributions.
pub fn maximize_utility_of_mixture(
    u: &UtilitySpec,
    blocks: &[(f64, &[Vec<f64>])],
    d: usize,
    cfg: &OptConfig,
) -> SimplexMax {
    let dims: Vec<usize> = blocks.iter().map(|(_, rows)| rows.len()).collect();
    let mix = |x: &[f64], e: &mut [f64]| {
        e.iter_mut().for_each(|v| *v = 0.0);
        let mut start = 0;
        for (w, rows) in blocks {
            for (row, &p) in rows.iter().zip(&x[start..]) {
                let c = w * p;
                for (ek, rk) in e.iter_mut().zip(row) {
                    *ek += c * rk;
                }
            }
            start += rows.len();
        }
    };
    let scratch = RefCell::new((vec![0.0; d], vec![0.0; d]));
    let f = |x: &[f64]| {
        let e = &mut scratch.borrow_mut().0;
        mix(x, e);
        u.eval_unchecked(e)
    };
    let grad = |x: &[f64], out: &mut [f64]| {
        let (e, du) = &mut *scratch.borrow_mut();
        mix(x, e);
        u.grad_into(e, du);
        let mut start = 0;
        for (w, rows) in blocks {
            for (o, row) in out[start..].iter_mut().zip(rows.iter()) {
                *o = w * du.iter().zip(row).map(|(a, b)| a * b).sum::<f64>();
            }
            start += rows.len();
        }
    };
    let grad_ref: Option<&dyn Fn(&[f64], &mut [f64])> = if u.is_differentiable() { Some(&grad) } else { None };
    maximize_over_simplices(&f, grad_ref, &dims, cfg)
}

/// Central finite-difference gradient of `f` at `p`.
pub fn finite_difference_grad<F>(f: F, p: &[f64], h: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let mut x = p.to_vec();
    (0..p.len())
        .map(|k| {
            x[k] = p[k] + h;
            let up = f(&x);
            x[k] = p[k] - h;
            let down = f(&x);
            x[k] = p[k];
            (up - down) / (2.0 * h)
        })
        .collect()
}
