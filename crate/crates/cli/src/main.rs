use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use monfg::equilibrium::{
    self, scan_ne_ser_grid, solve_ce_esr, CeObjective, Concept, ScanConfig, DEFAULT_TOL,
};
use monfg::learning::{run_experiment, ExperimentConfig};
use monfg::optim::OptConfig;
use monfg::{catalog, json, CorrelatedStrategy, Monfg, StrategyProfile, UtilitySpec};
use serde_json::Value;

#[derive(Parser)]
#[command(name = "monfg", version, about = "Equilibria and learning dynamics of multi-objective normal-form games")]
struct Cli {
    /// Worker threads for scan and learn (defaults to all cores).
    #[arg(long, global = true, env = "MONFG_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GameArgs {
    /// Catalog name or path of a game JSON file.
    #[arg(long)]
    game: String,
    /// Catalog name or path of a utilities JSON file.
    #[arg(long)]
    utilities: String,
}

#[derive(Subcommand)]
enum Command {
    /// Check a candidate against an equilibrium concept.
    Verify {
        #[command(flatten)]
        inputs: GameArgs,
        /// Catalog name or path of the candidate strategy.
        #[arg(long)]
        candidate: String,
        #[arg(long)]
        concept: Concept,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Seed of the best-response optimiser (ne-ser).
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the single-objective trade-off game.
    Tradeoff {
        #[command(flatten)]
        inputs: GameArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute a correlated equilibrium by linear programming.
    Solve {
        #[command(flatten)]
        inputs: GameArgs,
        #[arg(long, default_value = "ce-esr")]
        concept: Concept,
        /// feasible, max-sum or max-player=<k>
        #[arg(long, default_value = "feasible")]
        objective: CeObjective,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate every grid profile as an approximate SER Nash equilibrium.
    Scan {
        #[command(flatten)]
        inputs: GameArgs,
        #[arg(long, default_value_t = 20)]
        resolution: usize,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000_000)]
        max_profiles: u128,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a learning experiment and write its metrics.
    Learn {
        /// Experiment configuration JSON.
        #[arg(long)]
        config: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Overrides the base seed of the configuration.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Inspect the built-in examples.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    List,
    Show {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure carrying the process exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        let internal = error
            .chain()
            .any(|e| e.downcast_ref::<monfg::Error>().is_some_and(monfg::Error::is_internal));
        Failure {
            code: if internal { 3 } else { 2 },
            error,
        }
    }
}

impl From<monfg::Error> for Failure {
    fn from(e: monfg::Error) -> Self {
        anyhow::Error::new(e).into()
    }
}

fn read_json(path: &Path) -> anyhow::Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// A path when one exists on disk, otherwise a catalog name.
fn source(arg: &str) -> Option<&Path> {
    let path = Path::new(arg);
    path.is_file().then_some(path)
}

fn load_game(arg: &str) -> anyhow::Result<Monfg> {
    match source(arg) {
        Some(path) => Ok(json::game_from_value(&read_json(path)?).with_context(|| format!("game {arg}"))?),
        None => Ok(catalog::game(arg)?),
    }
}

fn load_utilities(arg: &str) -> anyhow::Result<Vec<UtilitySpec>> {
    match source(arg) {
        Some(path) => Ok(json::utilities_from_value(&read_json(path)?).with_context(|| format!("utilities {arg}"))?),
        None => Ok(catalog::utility_pair(arg)?),
    }
}

fn load_profile(arg: &str) -> anyhow::Result<StrategyProfile> {
    match source(arg) {
        Some(path) => Ok(json::profile_from_value(&read_json(path)?).with_context(|| format!("candidate {arg}"))?),
        None => Ok(catalog::profile(arg)?),
    }
}

fn load_correlated(arg: &str) -> anyhow::Result<CorrelatedStrategy> {
    match source(arg) {
        Some(path) => Ok(json::correlated_from_value(&read_json(path)?).with_context(|| format!("candidate {arg}"))?),
        None => Ok(catalog::correlated_strategy(arg)?),
    }
}

fn emit(value: &Value, out: Option<&Path>) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn verify(
    inputs: &GameArgs,
    candidate: &str,
    concept: Concept,
    tol: f64,
    seed: u64,
    out: Option<&Path>,
) -> Result<bool, Failure> {
    let game = load_game(&inputs.game)?;
    let utilities = load_utilities(&inputs.utilities)?;
    let opt = OptConfig {
        seed,
        ..OptConfig::default()
    };
    let report = if concept.is_correlated() {
        let sigma = load_correlated(candidate)?;
        match concept {
            Concept::CeEsr => equilibrium::verify_ce_esr(&game, &utilities, &sigma, tol)?,
            Concept::CeSerSingle => equilibrium::verify_ce_ser_single(&game, &utilities, &sigma, tol)?,
            _ => equilibrium::verify_ce_ser_multi(&game, &utilities, &sigma, tol)?,
        }
    } else {
        let profile = load_profile(candidate)?;
        match concept {
            Concept::NeEsr => equilibrium::verify_ne_esr(&game, &utilities, &profile, tol)?,
            _ => equilibrium::verify_ne_ser(&game, &utilities, &profile, tol, &opt)?,
        }
    };
    emit(&serde_json::to_value(&report).map_err(anyhow::Error::from)?, out)?;
    Ok(report.verdict)
}

fn run(cli: Cli) -> Result<bool, Failure> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(anyhow!("--threads must be positive").into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(anyhow::Error::from)?;
    }
    match cli.command {
        Command::Verify {
            inputs,
            candidate,
            concept,
            tol,
            seed,
            out,
        } => verify(&inputs, &candidate, concept, tol, seed, out.as_deref()),
        Command::Tradeoff { inputs, out } => {
            let game = load_game(&inputs.game)?;
            let utilities = load_utilities(&inputs.utilities)?;
            let scalar = equilibrium::tradeoff_game(&game, &utilities)?;
            emit(&json::game_to_value(&scalar), out.as_deref())?;
            Ok(true)
        }
        Command::Solve {
            inputs,
            concept,
            objective,
            out,
        } => {
            if concept != Concept::CeEsr {
                return Err(anyhow!("only ce-esr can be solved, got {concept:?}").into());
            }
            let game = load_game(&inputs.game)?;
            let utilities = load_utilities(&inputs.utilities)?;
            let sigma = solve_ce_esr(&game, &utilities, objective)?;
            emit(&json::correlated_to_value(&sigma), out.as_deref())?;
            Ok(true)
        }
        Command::Scan {
            inputs,
            resolution,
            tol,
            seed,
            max_profiles,
            out,
        } => {
            let game = load_game(&inputs.game)?;
            let utilities = load_utilities(&inputs.utilities)?;
            let cfg = ScanConfig {
                opt: OptConfig {
                    seed,
                    ..OptConfig::default()
                },
                max_profiles,
            };
            let result = scan_ne_ser_grid(&game, &utilities, resolution, tol, &cfg)?;
            let mut value = serde_json::to_value(&result).map_err(anyhow::Error::from)?;
            value["seed"] = seed.into();
            emit(&value, out.as_deref())?;
            Ok(true)
        }
        Command::Learn { config, out, seed } => {
            let text = fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let mut cfg = ExperimentConfig::from_json(&text)?;
            if let Some(seed) = seed {
                cfg.base_seed = seed;
            }
            let metrics = run_experiment(&cfg)?;
            metrics.write(&cfg, &out)?;
            eprintln!(
                "{} trials, convergence fraction {}, final means {:?}",
                cfg.trials, metrics.convergence_fraction, metrics.final_means
            );
            Ok(true)
        }
        Command::Catalog { action } => {
            match action {
                CatalogAction::List => {
                    for (name, kind, provenance) in catalog::list() {
                        let kind = serde_json::to_value(kind).map_err(anyhow::Error::from)?;
                        println!("{name}\t{}\t{provenance}", kind.as_str().unwrap_or_default());
                    }
                }
                CatalogAction::Show { name, out } => emit(&catalog::get(&name)?.to_json(), out.as_deref())?,
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn internal_errors_map_to_three() {
        let f: Failure = monfg::Error::Solver("boom".into()).into();
        assert_eq!(f.code, 3);
        let f: Failure = monfg::Error::UnknownName("x".into()).into();
        assert_eq!(f.code, 2);
        let f: Failure = anyhow::Error::new(monfg::Error::Infeasible).context("solving").into();
        assert_eq!(f.code, 3);
    }

    #[test]
    fn paths_take_precedence_over_names() {
        assert!(source("game3").is_none());
        assert!(source(concat!(env!("CARGO_MANIFEST_DIR"), "/Cargo.toml")).is_some());
    }

    #[test]
    fn parser_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
