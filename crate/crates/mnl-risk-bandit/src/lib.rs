//! Risk-aware assortment bandits under the multinomial logit choice model.
//!
//! A seller repeatedly shows an assortment of at most `K` out of `N` products
//! to arriving customers. Each customer buys product `i` from assortment `S`
//! with probability `v_i / (1 + Σ_{j∈S} v_j)` or nothing with the remaining
//! probability; a purchase of product `i` pays its known profit `r_i`. The
//! preference weights `v` are unknown, and instead of plain expected revenue
//! the seller maximizes a risk criterion `U` — conditional value-at-risk,
//! entropy risk, Sharpe ratio, mean-variance, and friends — applied to the
//! profit distribution of the served assortment. Performance is measured as
//! regret against the best fixed assortment under the true weights.
//!
//! The crate provides:
//!
//! - [`dist`]: finite discrete reward distributions on `[0, 1]`, including
//!   construction from an assortment under the choice model;
//! - [`risk`]: the criterion family with closed-form evaluation and each
//!   criterion's boundedness / Lipschitz constants;
//! - [`env`]: the simulated environment and serve-until-no-purchase episodes;
//! - [`optimize`]: exhaustive and local-search assortment optimization;
//! - [`agent`]: the risk-aware UCB and Thompson-sampling agents and their
//!   expected-revenue baselines;
//! - [`experiment`]: a seeded, parallel, byte-reproducible experiment harness
//!   with regret curves, rolling risk tracking, and CSV/JSON interfaces;
//! - [`verify`]: randomized property suites runnable from the CLI.
//!
//! Every capability has a runnable example under `examples/`; start with
//!
//! ```bash
//! cargo run --release --example risk_criteria
//! cargo run --release --example assortment_search
//! cargo run --release --example episode_simulation
//! cargo run --release --example regret_experiment
//! cargo run --release --example rolling_risk
//! ```
//!
//! A thin binary (`mnl-risk-bandit`) exposes the same machinery as the
//! subcommands `simulate`, `gen-instance`, `eval-risk`, `best-assortment`,
//! and `verify`.

pub mod agent;
pub mod cli;
pub mod dist;
pub mod env;
pub mod error;
pub mod experiment;
pub mod optimize;
pub mod risk;
pub mod seeding;
pub mod verify;

pub use agent::{
    ts_virtual_params, ts_virtual_params_with_noise, ucb_optimistic_params, AgentState, Algorithm,
    FixedAssortmentPolicy, Phase, Policy, ProductStats,
};
pub use dist::{Atom, RewardDistribution};
pub use env::{choice_probabilities, run_episode, sample_choice, EpisodeResult, Instance};
pub use error::{Error, Result};
pub use experiment::{
    aggregate, checkpoint_grid, generate_instance, results_csv, rolling_csv, rolling_risk,
    rolling_risk_of_payoffs, run_experiment, run_simulation, run_with_policy, write_output_files,
    AggregateCurve, AlgorithmResult, ExperimentConfig, ExperimentOutput, ServedEpisode, Trajectory,
};
pub use optimize::{
    optimize_exact, optimize_exact_with_cap, optimize_local, optimize_local_random_init,
    OptimizationResult, OptimizerMode, DEFAULT_ENUMERATION_CAP,
};
pub use risk::{CriterionConstants, RiskCriterion};
pub use seeding::{derive_rng, SimRng};
pub use verify::{run_suite, Suite, SuiteReport};
