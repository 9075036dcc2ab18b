//! Command-line front end.
//!
//! Subcommands: `simulate` (run a configured experiment and write CSV
//! results), `gen-instance` (sample and save a random instance), `eval-risk`
//! (score a distribution file under a criterion), `best-assortment` (search
//! an instance for the risk-optimal assortment), and `verify` (run a named
//! property suite).
//!
//! Exit codes: 0 on success, 1 on validation or computation failure, 2 on
//! usage errors. Diagnostics go to standard error.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::dist::RewardDistribution;
use crate::env::Instance;
use crate::error::{Error, Result};
use crate::experiment::{run_experiment, write_output_files, ExperimentConfig};
use crate::optimize::{optimize_exact, optimize_local_random_init};
use crate::risk::RiskCriterion;
use crate::seeding::{derive_rng, PURPOSE_INSTANCE};
use crate::verify::{run_suite, Suite, DEFAULT_VERIFY_SEED};

/// Stream tag for the local search's starting assortment.
const PURPOSE_SEARCH_INIT: u64 = 100;

#[derive(Parser)]
#[command(
    name = "mnl-risk-bandit",
    version,
    about = "Risk-aware assortment bandits under the multinomial logit choice model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config and write CSV results.
    Simulate {
        /// Experiment config file (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Output directory for results.csv, rolling.csv and instances.
        #[arg(long)]
        out: PathBuf,
        /// Cap on parallel worker threads.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Sample a random instance and write it as JSON.
    GenInstance {
        /// Number of products.
        #[arg(long)]
        n: usize,
        /// Cardinality limit.
        #[arg(long)]
        k: usize,
        /// Seed for the instance stream.
        #[arg(long)]
        seed: u64,
        /// Output file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the value of a risk criterion on a distribution file.
    EvalRisk {
        /// Criterion encoding, e.g. cvar:0.05, mean, sharpe:0.2,0.01.
        #[arg(long)]
        criterion: String,
        /// JSON file holding an array of [payoff, mass] pairs.
        #[arg(long)]
        dist: PathBuf,
    },
    /// Print the risk-optimal assortment of an instance and its value.
    BestAssortment {
        /// Instance file (JSON).
        #[arg(long)]
        instance: PathBuf,
        /// Criterion encoding.
        #[arg(long)]
        criterion: String,
        /// Use steepest-ascent local search instead of enumeration.
        #[arg(long)]
        local: bool,
        /// Seed for the local search's random starting assortment.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a named property suite; exits non-zero on failure.
    Verify {
        /// One of: lipschitz, quasiconvex, monotone-max, cvar-dual, episode-geom.
        #[arg(long)]
        suite: String,
        /// Seed for the suite's sampling stream.
        #[arg(long)]
        seed: Option<u64>,
    },
}

/// Parses `std::env::args` and dispatches; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests land here too and must exit 0.
            let code = if err.use_stderr() { 2 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            1
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Simulate {
            config,
            out,
            threads,
        } => {
            let config = ExperimentConfig::load(&config)?;
            let output = match threads {
                Some(threads) => rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build()
                    .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?
                    .install(|| run_experiment(&config)),
                None => run_experiment(&config),
            }?;
            let written = write_output_files(&output, &out)?;
            for path in written {
                println!("{}", path.display());
            }
            Ok(0)
        }
        Command::GenInstance { n, k, seed, out } => {
            let mut rng = derive_rng(seed, &[PURPOSE_INSTANCE, 0]);
            let instance = crate::experiment::generate_instance(n, k, &mut rng)?;
            instance.save(&out)?;
            println!("{}", out.display());
            Ok(0)
        }
        Command::EvalRisk { criterion, dist } => {
            let criterion: RiskCriterion = criterion.parse()?;
            let pairs: Vec<(f64, f64)> =
                serde_json::from_str(&std::fs::read_to_string(&dist)?)?;
            let distribution = RewardDistribution::new(pairs)?;
            println!("{}", criterion.evaluate(&distribution)?);
            Ok(0)
        }
        Command::BestAssortment {
            instance,
            criterion,
            local,
            seed,
        } => {
            let instance = Instance::load(&instance)?;
            let criterion: RiskCriterion = criterion.parse()?;
            let result = if local {
                let mut rng = derive_rng(seed, &[PURPOSE_SEARCH_INIT]);
                optimize_local_random_init(
                    instance.preferences(),
                    instance.profits(),
                    instance.cardinality_limit(),
                    &criterion,
                    &mut rng,
                )?
            } else {
                optimize_exact(
                    instance.preferences(),
                    instance.profits(),
                    instance.cardinality_limit(),
                    &criterion,
                )?
            };
            println!("{}", format_assortment(&result.assortment));
            println!("{}", result.value);
            Ok(0)
        }
        Command::Verify { suite, seed } => {
            let suite: Suite = suite.parse()?;
            let report = run_suite(suite, seed.unwrap_or(DEFAULT_VERIFY_SEED))?;
            println!("{report}");
            Ok(if report.passed() { 0 } else { 1 })
        }
    }
}

fn format_assortment(ids: &[usize]) -> String {
    let inner: Vec<String> = ids.iter().map(|id| id.to_string()).collect();
    format!("{{{}}}", inner.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn assortment_formatting() {
        assert_eq!(format_assortment(&[]), "{}");
        assert_eq!(format_assortment(&[1]), "{1}");
        assert_eq!(format_assortment(&[1, 3, 7]), "{1, 3, 7}");
    }
}
