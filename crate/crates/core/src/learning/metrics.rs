use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::{run_trial, ExperimentConfig, TrialTrace};
use crate::{Error, Result};

/// Width of the sliding window over taken actions.
pub const SLIDING_WINDOW: usize = 100;
/// Number of final episodes summarised per trial.
pub const FINAL_WINDOW: usize = 1000;
/// Joint-action mass above which a trial counts as converged.
pub const CONVERGENCE_MASS: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialSummary {
    pub index: usize,
    pub seed: u64,
    /// Mean scalarised payoff per agent over the final window.
    pub final_means: Vec<f64>,
    /// Own-action frequencies per agent over the final window.
    pub final_action_freq: Vec<Vec<f64>>,
    /// Joint-action frequencies over the final window.
    pub joint_last: Vec<f64>,
    /// Label of the joint action holding at least [`CONVERGENCE_MASS`] of
    /// the final window, if any.
    pub converged_to: Option<String>,
    /// Per agent, the fraction of final-window episodes in which the taken
    /// action differs from the recommendation (signal modes only).
    pub deviation_rate: Option<Vec<f64>>,
}

/// Aggregates across trials. Per-episode series are indexed
/// `[agent][episode]` and `[agent][action][episode]`; standard deviations
/// are population deviations across trials.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentMetrics {
    pub payoff_mean: Vec<Vec<f64>>,
    pub payoff_std: Vec<Vec<f64>>,
    pub action_mean: Vec<Vec<Vec<f64>>>,
    pub action_std: Vec<Vec<Vec<f64>>>,
    /// Final-window joint distribution, averaged across trials.
    pub joint_last: Vec<f64>,
    /// Final-window mean scalarised payoff per agent, averaged across trials.
    pub final_means: Vec<f64>,
    pub convergence_fraction: f64,
    /// Fraction of trials converged to each joint-action label.
    pub convergence_by_label: BTreeMap<String, f64>,
    pub trials: Vec<TrialSummary>,
}

struct TrialStats {
    scalarised: Vec<Vec<f64>>,
    windowed: Vec<Vec<Vec<f64>>>,
    summary: TrialSummary,
}

fn sliding_frequencies(actions: &[usize], k: usize) -> Vec<Vec<f64>> {
    let mut counts = vec![0usize; k];
    let mut out = vec![Vec::with_capacity(actions.len()); k];
    for (e, &a) in actions.iter().enumerate() {
        counts[a] += 1;
        if e >= SLIDING_WINDOW {
            counts[actions[e - SLIDING_WINDOW]] -= 1;
        }
        let width = (e + 1).min(SLIDING_WINDOW) as f64;
        for (series, &c) in out.iter_mut().zip(&counts) {
            series.push(c as f64 / width);
        }
    }
    out
}

fn summarise(cfg: &ExperimentConfig, trace: TrialTrace) -> TrialStats {
    let game = &cfg.game;
    let n = game.num_players();
    let episodes = cfg.episodes;
    let start = episodes.saturating_sub(FINAL_WINDOW);
    let width = (episodes - start) as f64;

    let mut joint_last = vec![0.0; game.num_joint()];
    let mut joint = vec![0; n];
    for e in start..episodes {
        for (slot, acts) in joint.iter_mut().zip(&trace.actions) {
            *slot = acts[e];
        }
        joint_last[game.joint_index(&joint)] += 1.0;
    }
    joint_last.iter_mut().for_each(|c| *c /= width);

    let final_means = trace.scalarised.iter().map(|s| s[start..].iter().sum::<f64>() / width).collect();
    let final_action_freq = (0..n)
        .map(|i| {
            let mut f = vec![0.0; game.action_count(i)];
            for &a in &trace.actions[i][start..] {
                f[a] += 1.0;
            }
            f.iter_mut().for_each(|c| *c /= width);
            f
        })
        .collect();
    let converged_to = joint_last
        .iter()
        .position(|&m| m >= CONVERGENCE_MASS)
        .map(|j| game.joint_label(j));
    let deviation_rate = trace.signals.as_ref().map(|signals| {
        (0..n)
            .map(|i| {
                let misses = (start..episodes).filter(|&e| trace.actions[i][e] != signals[i][e]).count();
                misses as f64 / width
            })
            .collect()
    });
    let windowed = (0..n)
        .map(|i| sliding_frequencies(&trace.actions[i], game.action_count(i)))
        .collect();
    TrialStats {
        summary: TrialSummary {
            index: trace.trial_index,
            seed: trace.seed,
            final_means,
            final_action_freq,
            joint_last,
            converged_to,
            deviation_rate,
        },
        scalarised: trace.scalarised,
        windowed,
    }
}

fn mean_std<'a>(series: impl Iterator<Item = &'a [f64]> + Clone, len: usize, count: usize) -> (Vec<f64>, Vec<f64>) {
    let mut mean = vec![0.0; len];
    for s in series.clone() {
        for (m, v) in mean.iter_mut().zip(s) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= count as f64);
    let mut var = vec![0.0; len];
    for s in series {
        for ((acc, v), m) in var.iter_mut().zip(s).zip(&mean) {
            *acc += (v - m) * (v - m);
        }
    }
    let std = var.into_iter().map(|v| (v / count as f64).sqrt()).collect();
    (mean, std)
}

/// Runs `cfg.trials` independent trials in parallel and aggregates them in
/// trial order, so results do not depend on the thread count.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentMetrics> {
    cfg.validate()?;
    let stats = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(cfg, t).map(|trace| summarise(cfg, trace)))
        .collect::<Result<Vec<TrialStats>>>()?;
    let game = &cfg.game;
    let n = game.num_players();
    let count = stats.len();
    let episodes = cfg.episodes;

    let mut payoff_mean = Vec::with_capacity(n);
    let mut payoff_std = Vec::with_capacity(n);
    let mut action_mean = Vec::with_capacity(n);
    let mut action_std = Vec::with_capacity(n);
    for i in 0..n {
        let (m, s) = mean_std(stats.iter().map(|t| t.scalarised[i].as_slice()), episodes, count);
        payoff_mean.push(m);
        payoff_std.push(s);
        let (mut am, mut asd) = (Vec::new(), Vec::new());
        for a in 0..game.action_count(i) {
            let (m, s) = mean_std(stats.iter().map(|t| t.windowed[i][a].as_slice()), episodes, count);
            am.push(m);
            asd.push(s);
        }
        action_mean.push(am);
        action_std.push(asd);
    }
    let trials: Vec<TrialSummary> = stats.into_iter().map(|t| t.summary).collect();
    let (joint_last, _) = mean_std(trials.iter().map(|t| t.joint_last.as_slice()), game.num_joint(), count);
    let (final_means, _) = mean_std(trials.iter().map(|t| t.final_means.as_slice()), n, count);
    let mut convergence_by_label = BTreeMap::new();
    for label in trials.iter().filter_map(|t| t.converged_to.clone()) {
        *convergence_by_label.entry(label).or_insert(0.0) += 1.0 / count as f64;
    }
    let converged = trials.iter().filter(|t| t.converged_to.is_some()).count();
    Ok(ExperimentMetrics {
        payoff_mean,
        payoff_std,
        action_mean,
        action_std,
        joint_last,
        final_means,
        convergence_fraction: converged as f64 / count as f64,
        convergence_by_label,
        trials,
    })
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

impl ExperimentMetrics {
    /// Fraction of trials converged to any of the joint actions `labels`.
    pub fn convergence_to(&self, labels: &[&str]) -> f64 {
        labels.iter().filter_map(|l| self.convergence_by_label.get(*l)).sum()
    }

    /// Writes `payoffs.csv`, `actions_agent<i>.csv`, `joint_last1000.csv`
    /// and `summary.json` into `dir`, creating it if needed.
    pub fn write(&self, cfg: &ExperimentConfig, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let game = &cfg.game;

        let mut w = csv::Writer::from_path(dir.join("payoffs.csv")).map_err(csv_error)?;
        w.write_record(["episode", "agent", "mean", "std"]).map_err(csv_error)?;
        for (i, (mean, std)) in self.payoff_mean.iter().zip(&self.payoff_std).enumerate() {
            for (e, (m, s)) in mean.iter().zip(std).enumerate() {
                w.write_record([(e + 1).to_string(), i.to_string(), fmt(*m), fmt(*s)])
                    .map_err(csv_error)?;
            }
        }
        w.flush()?;

        for (i, (mean, std)) in self.action_mean.iter().zip(&self.action_std).enumerate() {
            let mut w = csv::Writer::from_path(dir.join(format!("actions_agent{i}.csv"))).map_err(csv_error)?;
            let mut header = vec!["episode".to_string()];
            for label in &game.action_labels()[i] {
                header.push(format!("{label}_mean"));
                header.push(format!("{label}_std"));
            }
            w.write_record(&header).map_err(csv_error)?;
            for e in 0..cfg.episodes {
                let mut row = vec![(e + 1).to_string()];
                for (m, s) in mean.iter().zip(std) {
                    row.push(fmt(m[e]));
                    row.push(fmt(s[e]));
                }
                w.write_record(&row).map_err(csv_error)?;
            }
            w.flush()?;
        }

        let mut w = csv::Writer::from_path(dir.join("joint_last1000.csv")).map_err(csv_error)?;
        w.write_record(["joint_action", "frequency"]).map_err(csv_error)?;
        for (j, f) in self.joint_last.iter().enumerate() {
            w.write_record([game.joint_label(j), fmt(*f)]).map_err(csv_error)?;
        }
        w.flush()?;

        let joint_last: BTreeMap<String, f64> =
            (0..game.num_joint()).map(|j| (game.joint_label(j), self.joint_last[j])).collect();
        let summary = json!({
            "config": cfg,
            "seeds": (0..cfg.trials).map(|t| cfg.trial_seed(t)).collect::<Vec<_>>(),
            "final_means": self.final_means,
            "convergence_fraction": self.convergence_fraction,
            "convergence_by_label": self.convergence_by_label,
            "joint_last": joint_last,
            "trials": self.trials,
            "metadata": {
                "q_init": "zero",
                "exploration_updates_q": true,
                "final_window": FINAL_WINDOW,
                "sliding_window": SLIDING_WINDOW,
                "convergence_mass": CONVERGENCE_MASS,
                "std": "population",
            },
        });
        let mut text = serde_json::to_string_pretty(&summary)?;
        text.push('\n');
        fs::write(dir.join("summary.json"), text)?;
        Ok(())
    }
}
