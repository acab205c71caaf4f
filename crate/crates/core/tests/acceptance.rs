//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use common::*;
use monfg::equilibrium::{
    conditional_ser_table, scan_ne_ser_grid, solve_ce_esr, tradeoff_game, verify_ce_esr, verify_ce_ser_multi,
    verify_ce_ser_single, verify_ne_esr, verify_ne_ser, CeObjective, ScanConfig,
};
use monfg::learning::{run_experiment, ExperimentConfig, ExperimentMetrics, SignalMode};
use monfg::optim::{finite_difference_grad, project_to_simplex, OptConfig};
use monfg::value::{esr_value, esr_value_correlated, expected_payoff_correlated, expected_payoff_profile};
use monfg::{catalog, CorrelatedStrategy, MixedStrategy, StrategyProfile, UtilitySpec};
use rand::Rng;

/// Collects failed checks of one criterion.
#[derive(Default)]
struct Checks {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Checks {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn close(&mut self, got: f64, want: f64, tol: f64, what: &str) {
        self.check((got - want).abs() <= tol, format!("{what}: got {got}, want {want} +- {tol}"));
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
}

fn utils() -> Vec<UtilitySpec> {
    catalog::polysum_product().to_vec()
}

fn criterion_1(c: &mut Checks) {
    let chicken = catalog::game("chicken").unwrap();
    let ids = catalog::utility_pair("identity").unwrap();
    let ce = catalog::correlated_strategy("chicken_ce").unwrap();
    for i in 0..2 {
        c.close(esr_value_correlated(&chicken, &ce, i, &ids[i]).unwrap(), 5.25, 1e-9, "chicken CE payoff");
    }

    let us = utils();
    let g1 = catalog::game("imbalancing").unwrap();
    let table = tradeoff_game(&g1, &us).unwrap();
    let expected = [
        [(16.0, 0.0), (10.0, 3.0), (8.0, 4.0)],
        [(10.0, 3.0), (8.0, 4.0), (10.0, 3.0)],
        [(8.0, 4.0), (10.0, 3.0), (16.0, 0.0)],
    ];
    for (a, row) in expected.iter().enumerate() {
        for (b, &(r, col)) in row.iter().enumerate() {
            c.close(table.payoff(&[a, b], 0)[0], r, 1e-9, &format!("trade-off ({a},{b}) row"));
            c.close(table.payoff(&[a, b], 1)[0], col, 1e-9, &format!("trade-off ({a},{b}) column"));
        }
    }

    let ne = catalog::profile("imbalancing_esr_ne").unwrap();
    c.close(esr_value(&g1, &ne, 0, &us[0]).unwrap(), 10.0, 1e-9, "ESR NE row value");
    c.close(esr_value(&g1, &ne, 1, &us[1]).unwrap(), 3.0, 1e-9, "ESR NE column value");

    let rows = |game: &str, sigma: &str, player: usize| {
        let g = catalog::game(game).unwrap();
        let s = catalog::correlated_strategy(sigma).unwrap();
        conditional_ser_table(&g, &us[player], &s, player).unwrap()
    };
    let expect_row = |c: &mut Checks, got: &Option<Vec<f64>>, want: &[f64], what: &str| match got {
        Some(v) => {
            c.check(v.len() == want.len(), format!("{what}: length {}", v.len()));
            for (x, y) in v.iter().zip(want) {
                c.close(*x, *y, 1e-9, what);
            }
        }
        None => c.check(false, format!("{what}: recommendation never delivered")),
    };
    let t = rows("imbalancing", "imbalancing_ce", 0);
    expect_row(c, &t[0], &[10.0, 8.0, 10.0], "game 1 row, recommendation L");
    expect_row(c, &t[2], &[10.0, 8.0, 10.0], "game 1 row, recommendation R");
    let t = rows("imbalancing", "imbalancing_ce", 1);
    expect_row(c, &t[1], &[1.75, 3.75, 3.75], "game 1 column, recommendation M");

    for (player, want) in [(0, 10.0), (1, 3.0)] {
        let t = rows("game2", "game2_ce", player);
        for (rec, row) in t.iter().enumerate() {
            let v = row.as_ref().map(|r| r[rec]).unwrap_or(f64::NAN);
            c.close(v, want, 1e-9, &format!("game 2 player {player} recommendation {rec}"));
        }
    }
    for (player, want) in [(0, [17.0, 13.0]), (1, [4.0, 6.0])] {
        let t = rows("game3", "game3_ce", player);
        for rec in 0..2 {
            let v = t[rec].as_ref().map(|r| r[rec]).unwrap_or(f64::NAN);
            c.close(v, want[rec], 1e-9, &format!("game 3 player {player} recommendation {rec}"));
        }
    }

    let g3 = catalog::game("game3").unwrap();
    for (a, want) in [(0, [17.0, 4.0]), (1, [13.0, 6.0])] {
        for i in 0..2 {
            let v = us[i].eval(g3.payoff(&[a, a], i)).unwrap();
            c.close(v, want[i], 1e-9, &format!("game 3 pure profile ({a},{a}) player {i}"));
        }
    }
}

fn criterion_2(c: &mut Checks) {
    let us = utils();
    let g1 = catalog::game("imbalancing").unwrap();
    let ce1 = catalog::correlated_strategy("imbalancing_ce").unwrap();
    c.check(verify_ce_ser_single(&g1, &us, &ce1, 1e-9).unwrap().verdict, "imbalancing_ce single-signal");
    c.check(!verify_ce_ser_multi(&g1, &us, &ce1, 1e-9).unwrap().verdict, "imbalancing_ce multi-signal");

    let g3 = catalog::game("game3").unwrap();
    let ce3 = catalog::correlated_strategy("game3_ce").unwrap();
    c.check(verify_ce_ser_single(&g3, &us, &ce3, 1e-9).unwrap().verdict, "game3_ce single-signal");
    c.check(verify_ce_ser_multi(&g3, &us, &ce3, 1e-9).unwrap().verdict, "game3_ce multi-signal");

    let chicken = catalog::game("chicken").unwrap();
    let ids = catalog::utility_pair("identity").unwrap();
    let cc = catalog::correlated_strategy("chicken_ce").unwrap();
    c.check(verify_ce_esr(&chicken, &ids, &cc, 1e-9).unwrap().verdict, "chicken_ce CE-ESR");

    let ne = catalog::profile("imbalancing_esr_ne").unwrap();
    c.check(verify_ne_esr(&g1, &us, &ne, 1e-9).unwrap().verdict, "mixed profile NE-ESR");
    let ser = verify_ne_ser(&g1, &us, &ne, 1e-6, &OptConfig::default()).unwrap();
    c.check(!ser.verdict, "mixed profile NE-SER verdict");
    c.close(ser.players[0].max_gain, 2.0, 1e-6, "mixed profile NE-SER row gain");
}

fn criterion_3(c: &mut Checks) {
    let us = utils();
    let cfg = ScanConfig::default();
    let g1 = catalog::game("imbalancing").unwrap();
    let r = scan_ne_ser_grid(&g1, &us, 20, 1e-6, &cfg).unwrap();
    c.note(format!("imbalancing min_max_gain {:.4}", r.min_max_gain));
    c.check(r.approx_equilibria.is_empty(), format!("imbalancing: {} approximate NE", r.approx_equilibria.len()));
    c.check(r.min_max_gain > 0.05, format!("imbalancing min_max_gain {}", r.min_max_gain));

    let g3 = catalog::game("game3").unwrap();
    let r = scan_ne_ser_grid(&g3, &us, 20, 1e-6, &cfg).unwrap();
    let pure: Vec<StrategyProfile> = (0..3).map(|a| StrategyProfile::pure(&g3, &[a, a])).collect();
    let found: Vec<String> = r.approx_equilibria.iter().map(|p| format!("{:?}", p.strategies())).collect();
    c.note(format!("game3 grid equilibria {found:?}"));
    c.check(
        r.approx_equilibria.len() == 3 && pure.iter().all(|p| r.approx_equilibria.contains(p)),
        format!("game3: expected (L,L), (M,M), (R,R), found {found:?}"),
    );
}

fn criterion_4(c: &mut Checks) {
    let mut rng = seeded(2024);
    let cfg = OptConfig::default();
    let mut disagreements = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let counts = [rng.gen_range(1..=3), rng.gen_range(1..=3)];
        let g = random_game(&mut rng, &counts, 2, -5.0, 5.0);
        let us = vec![random_linear(&mut rng, 2), random_linear(&mut rng, 2)];
        let pure = StrategyProfile::pure(&g, &[rng.gen_range(0..counts[0]), rng.gen_range(0..counts[1])]);
        for profile in [random_profile(&mut rng, &g), pure] {
            let esr = verify_ne_esr(&g, &us, &profile, 1e-6).unwrap();
            let ser = verify_ne_ser(&g, &us, &profile, 1e-6, &cfg).unwrap();
            if esr.verdict != ser.verdict {
                disagreements += 1;
            }
            for (x, y) in esr.players.iter().zip(&ser.players) {
                worst = worst.max((x.max_gain.max(0.0) - y.max_gain.max(0.0)).abs());
            }
        }
    }
    c.note(format!("largest gain difference {worst:.2e}"));
    c.check(disagreements == 0, format!("{disagreements} verdict disagreements"));
    c.check(worst <= 1e-6, format!("gain difference {worst}"));
}

fn experiment(game: &str, mode: SignalMode, sigma: Option<&str>) -> ExperimentMetrics {
    let mut cfg = ExperimentConfig::new(catalog::game(game).unwrap(), utils());
    if let Some(name) = sigma {
        cfg = cfg.with_signals(mode, catalog::correlated_strategy(name).unwrap());
    }
    run_experiment(&cfg).unwrap()
}

fn criterion_5(c: &mut Checks) {
    let us = utils();
    let g1 = catalog::game("imbalancing").unwrap();

    let none = experiment("imbalancing", SignalMode::None, None);
    c.note(format!("game 1 none: convergence {:.2}", none.convergence_fraction));
    c.check(none.convergence_fraction <= 0.1, format!("game 1 none: convergence {}", none.convergence_fraction));
    let unstable = none
        .trials
        .iter()
        .filter(|t| {
            let profile = StrategyProfile::new(
                t.final_action_freq.iter().map(|f| MixedStrategy::new(f.clone()).unwrap()).collect(),
            );
            let r = verify_ne_ser(&g1, &us, &profile, 0.1, &OptConfig::default()).unwrap();
            r.players.iter().any(|p| p.max_gain > 0.1)
        })
        .count() as f64
        / none.trials.len() as f64;
    c.note(format!("game 1 none: NE-SER gain > 0.1 in {unstable:.2}"));
    c.check(unstable >= 0.9, format!("game 1 none: final strategies unstable in only {unstable}"));

    let single = experiment("imbalancing", SignalMode::SingleSignal, Some("imbalancing_ce"));
    let freq = |m: &ExperimentMetrics, i: usize, a: usize| {
        m.trials.iter().map(|t| t.final_action_freq[i][a]).sum::<f64>() / m.trials.len() as f64
    };
    c.note(format!(
        "game 1 single: column M {:.3}, row L/R {:.3}/{:.3}, means ({:.3}, {:.3})",
        freq(&single, 1, 1),
        freq(&single, 0, 0),
        freq(&single, 0, 2),
        single.final_means[0],
        single.final_means[1]
    ));
    c.check(freq(&single, 1, 1) >= 0.85, format!("game 1 single: column M frequency {}", freq(&single, 1, 1)));
    c.close(freq(&single, 0, 0), 0.75, 0.1, "game 1 single: row L frequency");
    c.close(freq(&single, 0, 2), 0.25, 0.1, "game 1 single: row R frequency");
    c.close(single.final_means[0], 10.0, 0.5, "game 1 single: row mean");
    c.close(single.final_means[1], 3.75, 0.5, "game 1 single: column mean");

    let multi = experiment("imbalancing", SignalMode::MultiSignal, Some("imbalancing_ce"));
    let deviation = multi
        .trials
        .iter()
        .map(|t| t.deviation_rate.as_ref().unwrap().iter().cloned().fold(0.0, f64::max))
        .sum::<f64>()
        / multi.trials.len() as f64;
    c.note(format!("game 1 multi: convergence {:.2}, deviation {deviation:.3}", multi.convergence_fraction));
    c.check(multi.convergence_fraction <= 0.1, format!("game 1 multi: convergence {}", multi.convergence_fraction));
    c.check(deviation > 0.1, format!("game 1 multi: deviation rate {deviation}"));

    let g3_none = experiment("game3", SignalMode::None, None);
    let diag = g3_none.convergence_to(&["L,L", "M,M", "R,R"]);
    c.note(format!(
        "game 3 none: diagonal convergence {diag:.2}, means ({:.3}, {:.3})",
        g3_none.final_means[0], g3_none.final_means[1]
    ));
    c.check(diag >= 0.85, format!("game 3 none: diagonal convergence {diag}"));
    c.close(g3_none.final_means[0], 13.98, 1.5, "game 3 none: row mean");
    c.close(g3_none.final_means[1], 4.38, 1.5, "game 3 none: column mean");

    for (mode, label) in [(SignalMode::SingleSignal, "single"), (SignalMode::MultiSignal, "multi")] {
        let m = experiment("game3", mode, Some("game3_ce"));
        c.note(format!("game 3 {label}: means ({:.3}, {:.3})", m.final_means[0], m.final_means[1]));
        c.close(m.final_means[0], 14.99, 0.5, &format!("game 3 {label}: row mean"));
        c.close(m.final_means[1], 5.0, 0.5, &format!("game 3 {label}: column mean"));
        for i in 0..2 {
            c.check(
                m.final_means[i] > g3_none.final_means[i],
                format!("game 3 {label}: agent {i} does not beat the no-signal mean"),
            );
        }
    }
}

fn criterion_6(c: &mut Checks) {
    let mut rng = seeded(6);
    let mut grad_ok = true;
    for variant in 0..3 {
        for _ in 0..1000 {
            let d = rng.gen_range(1..=4);
            let (u, p): (UtilitySpec, Vec<f64>) = match variant {
                0 => (random_linear(&mut rng, d), (0..d).map(|_| rng.gen_range(-10.0..10.0)).collect()),
                1 => {
                    let w = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
                    let e = (0..d).map(|_| rng.gen_range(1..=4)).collect();
                    (UtilitySpec::poly_sum(w, e).unwrap(), (0..d).map(|_| rng.gen_range(0.05..5.0)).collect())
                }
                _ => (UtilitySpec::product(), (0..d).map(|_| rng.gen_range(0.05..5.0)).collect()),
            };
            let g = u.grad(&p).unwrap();
            let fd = finite_difference_grad(|x| u.eval(x).unwrap(), &p, 1e-6);
            grad_ok &= g.iter().zip(&fd).all(|(a, b)| (a - b).abs() <= 1e-4 * a.abs().max(b.abs()).max(1.0));
        }
    }
    c.check(grad_ok, "gradient mismatch");

    let mut marginal_ok = true;
    for _ in 0..200 {
        let counts = [rng.gen_range(2..=3), rng.gen_range(2..=3)];
        let g = random_game(&mut rng, &counts, 2, -5.0, 5.0);
        let profile = random_profile(&mut rng, &g);
        let sigma = CorrelatedStrategy::from_profile(&g, &profile).unwrap();
        for i in 0..2 {
            let a = expected_payoff_profile(&g, &profile, i).unwrap();
            let b = expected_payoff_correlated(&g, &sigma, i).unwrap();
            marginal_ok &= a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= 1e-12);
        }
    }
    c.check(marginal_ok, "product-marginal mismatch");

    let mut projection_ok = true;
    for _ in 0..500 {
        let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let p = project_to_simplex(&x);
        let dist = |q: &[f64]| q.iter().zip(&x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        let best = dist(&p);
        for a in 0..=50 {
            for b in 0..=50 - a {
                let q = [a as f64 / 50.0, b as f64 / 50.0, (50 - a - b) as f64 / 50.0];
                projection_ok &= best <= dist(&q) + 1e-12;
            }
        }
    }
    c.check(projection_ok, "projection beaten by a grid point");

    let chicken = catalog::game("chicken").unwrap();
    let ids = catalog::utility_pair("identity").unwrap();
    let sigma = solve_ce_esr(&chicken, &ids, CeObjective::MaxUtilitySum).unwrap();
    let welfare: f64 = (0..2).map(|i| esr_value_correlated(&chicken, &sigma, i, &ids[i]).unwrap()).sum();
    c.note(format!("chicken max-sum {welfare:.6}"));
    c.check(welfare >= 10.5 - 1e-9, format!("chicken max-sum {welfare}"));
    let mut reverify = true;
    for t in 0..100 {
        let counts = [rng.gen_range(2..=3), rng.gen_range(2..=3)];
        let g = random_game(&mut rng, &counts, 2, 0.0, 5.0);
        let us = vec![UtilitySpec::product(), random_linear(&mut rng, 2)];
        let objective = [CeObjective::Feasible, CeObjective::MaxUtilitySum, CeObjective::MaxPlayer(t % 2)][t % 3];
        let s = solve_ce_esr(&g, &us, objective).unwrap();
        reverify &= verify_ce_esr(&g, &us, &s, 1e-7).unwrap().verdict;
    }
    c.check(reverify, "solved CE failed re-verification");

    let mut cfg = ExperimentConfig::new(catalog::game("game3").unwrap(), utils())
        .with_signals(SignalMode::MultiSignal, catalog::correlated_strategy("game3_ce").unwrap());
    cfg.trials = 2;
    cfg.episodes = 1500;
    let root = std::env::temp_dir().join(format!("monfg-acceptance-{}", std::process::id()));
    let dirs = [root.join("a"), root.join("b")];
    for dir in &dirs {
        run_experiment(&cfg).unwrap().write(&cfg, dir).unwrap();
    }
    for name in ["payoffs.csv", "actions_agent0.csv", "actions_agent1.csv", "joint_last1000.csv", "summary.json"] {
        let same = std::fs::read(dirs[0].join(name)).unwrap() == std::fs::read(dirs[1].join(name)).unwrap();
        c.check(same, format!("{name} differs between identical runs"));
    }
    let _ = std::fs::remove_dir_all(root);
    let a = scan_ne_ser_grid(&catalog::game("game2").unwrap(), &utils(), 10, 1e-6, &ScanConfig::default()).unwrap();
    let b = scan_ne_ser_grid(&catalog::game("game2").unwrap(), &utils(), 10, 1e-6, &ScanConfig::default()).unwrap();
    c.check(a == b, "scan results differ between identical runs");
}

fn main() {
    type Criterion = (&'static str, fn(&mut Checks), Option<Duration>);
    let criteria: [Criterion; 6] = [
        ("1 worked examples", criterion_1, Some(Duration::from_secs(1))),
        ("2 verdicts", criterion_2, Some(Duration::from_secs(1))),
        ("3 grid scans", criterion_3, None),
        ("4 linear utilities agree", criterion_4, Some(Duration::from_secs(60))),
        ("5 learning reproduction", criterion_5, None),
        ("6 property suites", criterion_6, None),
    ];
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, run, limit) in criteria {
        let id = name.split(' ').next().unwrap();
        if !only.is_empty() && !only.iter().any(|o| o == id) {
            continue;
        }
        let mut c = Checks::default();
        let start = Instant::now();
        run(&mut c);
        let elapsed = start.elapsed();
        if let Some(limit) = limit {
            c.check(elapsed <= limit, format!("runtime {elapsed:.2?} exceeds {limit:?}"));
        }
        let status = if c.failures.is_empty() { "PASS" } else { "FAIL" };
        println!("criterion {name}: {status} ({elapsed:.2?})");
        for n in &c.notes {
            println!("    {n}");
        }
        for f in &c.failures {
            println!("    failed: {f}");
        }
        if !c.failures.is_empty() {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
