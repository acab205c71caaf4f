use minilp::{ComparisonOp, OptimizationDirection, Problem};

use crate::{Error, Result};

/// `maximize objective·x` subject to `A x >= b`, `C x = d` and `x >= 0`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub ge: Vec<(Vec<f64>, f64)>,
    pub eq: Vec<(Vec<f64>, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
    /// Largest violation of any constraint (including `x >= 0`) before
    /// clamping.
    pub max_violation: f64,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        LinearProgram {
            objective,
            ..Default::default()
        }
    }

    /// Adds the constraint that `x` is a probability vector.
    pub fn with_simplex(mut self) -> Self {
        let n = self.objective.len();
        self.eq.push((vec![1.0; n], 1.0));
        self
    }

    fn check(&self) -> Result<()> {
        let n = self.objective.len();
        if n == 0 {
            return Err(Error::ShapeMismatch("linear program has no variables".into()));
        }
        for (row, _) in self.ge.iter().chain(&self.eq) {
            if row.len() != n {
                return Err(Error::ShapeMismatch(format!(
                    "constraint row has {} coefficients for {n} variables",
                    row.len()
                )));
            }
        }
        Ok(())
    }

    /// Largest amount by which `x` violates the constraints.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let dot = |row: &[f64]| row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        let ge = self.ge.iter().map(|(row, b)| b - dot(row));
        let eq = self.eq.iter().map(|(row, d)| (dot(row) - d).abs());
        let bounds = x.iter().map(|v| -v);
        ge.chain(eq).chain(bounds).fold(0.0, f64::max)
    }
}

/// Solves a small dense LP (backed by the `minilp` simplex solver).
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    lp.check()?;
    let mut problem = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> = lp
        .objective
        .iter()
        .map(|&c| problem.add_var(c, (0.0, f64::INFINITY)))
        .collect();
    let terms = |row: &[f64]| -> Vec<_> {
        vars.iter()
            .zip(row)
            .filter(|(_, &a)| a != 0.0)
            .map(|(&v, &a)| (v, a))
            .collect()
    };
    for (row, b) in &lp.ge {
        problem.add_constraint(terms(row).as_slice(), ComparisonOp::Ge, *b);
    }
    for (row, d) in &lp.eq {
        problem.add_constraint(terms(row).as_slice(), ComparisonOp::Eq, *d);
    }
    let solution = problem.solve().map_err(|e| match e {
        minilp::Error::Infeasible => Error::Infeasible,
        minilp::Error::Unbounded => Error::Unbounded,
    })?;
    let raw: Vec<f64> = vars.iter().map(|&v| solution[v]).collect();
    let max_violation = lp.violation(&raw);
    let x: Vec<f64> = raw.iter().map(|v| v.max(0.0)).collect();
    let value = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpSolution {
        x,
        value,
        max_violation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maximise_first_coordinate_on_simplex() {
        let lp = LinearProgram::new(vec![1.0, 0.0, 0.0]).with_simplex();
        let s = solve_lp(&lp).unwrap();
        assert!((s.value - 1.0).abs() < 1e-12);
        assert!((s.x[0] - 1.0).abs() < 1e-12);
        assert!(s.max_violation <= 1e-9);
    }

    #[test]
    fn contradictory_constraints_are_infeasible() {
        let mut lp = LinearProgram::new(vec![0.0, 0.0, 0.0]).with_simplex();
        lp.ge.push((vec![1.0, 0.0, 0.0], 2.0));
        assert!(matches!(solve_lp(&lp), Err(Error::Infeasible)));
    }

    #[test]
    fn unbounded_is_reported() {
        let lp = LinearProgram::new(vec![1.0, 1.0]);
        assert!(matches!(solve_lp(&lp), Err(Error::Unbounded)));
    }

    #[test]
    fn optimum_dominates_feasible_grid_points() {
        // maximise 3x + 2y + z on the simplex with x <= 0.4 and z - y >= -0.1
        let mut lp = LinearProgram::new(vec![3.0, 2.0, 1.0]).with_simplex();
        lp.ge.push((vec![-1.0, 0.0, 0.0], -0.4));
        lp.ge.push((vec![0.0, -1.0, 1.0], -0.1));
        let s = solve_lp(&lp).unwrap();
        assert!(s.max_violation <= 1e-9);
        for i in 0..=20 {
            for j in 0..=(20 - i) {
                let p = [i as f64 / 20.0, j as f64 / 20.0, (20 - i - j) as f64 / 20.0];
                if lp.violation(&p) <= 1e-12 {
                    let v = 3.0 * p[0] + 2.0 * p[1] + p[2];
                    assert!(s.value >= v - 1e-9);
                }
            }
        }
        assert!((s.value - 2.15).abs() < 1e-9);
    }
}
