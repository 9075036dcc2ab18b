//! Experiment harness: instance generation, simulation runs, regret curves,
//! rolling risk tracking, aggregation across repetitions and instances, and
//! the on-disk result formats.
//!
//! A simulation drives an agent against the environment for a fixed horizon.
//! The reference assortment `S*` is computed once — exhaustively when the
//! product count allows it, otherwise by local search with the trajectory
//! flagged as an approximate reference — and every step of an episode serving
//! `S` adds `U(F(S*, v)) - U(F(S, v))` to the cumulative regret.
//!
//! Experiments are reproducible by construction: instances and every
//! `(algorithm, instance, repetition)` simulation draw from counter-derived
//! substreams of the master seed (see [`crate::seeding`]), repetitions run in
//! parallel without affecting results, and result files are byte-identical
//! across runs of the same config.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agent::{AgentState, Algorithm, Policy};
use crate::dist::RewardDistribution;
use crate::env::{run_episode, Instance};
use crate::error::{Error, Result};
use crate::optimize::{
    optimize_exact, optimize_local, optimize_local_random_init, OptimizerMode,
    DEFAULT_ENUMERATION_CAP,
};
use crate::risk::RiskCriterion;
use crate::seeding::{derive_rng, SimRng, PURPOSE_INSTANCE, PURPOSE_SIMULATION, PURPOSE_VERIFY};

/// Regret is stored at every step up to this horizon; longer runs keep 1000
/// evenly spaced checkpoints plus the first and last step.
pub const FULL_RESOLUTION_HORIZON: usize = 10_000;

/// Declarative description of an experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n_products: usize,
    pub cardinality_limit: usize,
    pub horizon: usize,
    pub repetitions: usize,
    pub instance_count: usize,
    pub master_seed: u64,
    pub criterion: RiskCriterion,
    pub algorithms: Vec<Algorithm>,
    pub optimizer_mode: OptimizerMode,
    /// Window length for rolling empirical risk; omit to skip rolling output.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rolling_window: Option<usize>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_products == 0 {
            return Err(Error::InvalidInput("n_products must be at least 1".into()));
        }
        if self.cardinality_limit > self.n_products {
            return Err(Error::InvalidInput(format!(
                "cardinality limit {} exceeds {} products",
                self.cardinality_limit, self.n_products
            )));
        }
        if self.horizon == 0 {
            return Err(Error::InvalidInput("horizon must be at least 1".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::InvalidInput("repetitions must be at least 1".into()));
        }
        if self.instance_count == 0 {
            return Err(Error::InvalidInput(
                "instance_count must be at least 1".into(),
            ));
        }
        if self.algorithms.is_empty() {
            return Err(Error::InvalidInput("no algorithms configured".into()));
        }
        self.criterion.validate()?;
        if let Some(window) = self.rolling_window {
            if window == 0 || window > self.horizon {
                return Err(Error::InvalidInput(format!(
                    "rolling window {window} outside 1..={}",
                    self.horizon
                )));
            }
        }
        Ok(())
    }

    pub fn from_json_str(json: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(json)?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialization cannot fail")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }
}

/// Samples an instance with preferences uniform on `[0, 1]` and profits
/// uniform on `[0.1, 1]`; preferences are drawn first, then profits.
pub fn generate_instance<R: Rng + ?Sized>(
    n_products: usize,
    cardinality_limit: usize,
    rng: &mut R,
) -> Result<Instance> {
    let preferences: Vec<f64> = (0..n_products).map(|_| rng.random::<f64>()).collect();
    let profits: Vec<f64> = (0..n_products)
        .map(|_| 0.1 + 0.9 * rng.random::<f64>())
        .collect();
    Instance::new(preferences, profits, cardinality_limit)
}

/// One contiguous stretch of steps that served the same assortment.
#[derive(Clone, Debug, PartialEq)]
pub struct ServedEpisode {
    /// Product ids served, sorted ascending.
    pub assortment: Vec<usize>,
    /// Zero-based index of the episode's first step.
    pub start: usize,
    /// Number of steps in the episode.
    pub length: usize,
    /// True risk value `U(F(S, v))` of the served assortment.
    pub risk_value: f64,
    /// True when the episode was cut by the horizon.
    pub truncated: bool,
}

/// Full record of one simulation run.
#[derive(Clone, Debug)]
pub struct Trajectory {
    payoffs: Vec<f64>,
    cumulative_regret: Vec<f64>,
    episodes: Vec<ServedEpisode>,
    optimal_assortment: Vec<usize>,
    optimal_value: f64,
    approx_optimum: bool,
}

impl Trajectory {
    /// Number of steps taken (the configured horizon).
    pub fn horizon(&self) -> usize {
        self.payoffs.len()
    }

    /// Realized payoff of each step.
    pub fn payoffs(&self) -> &[f64] {
        &self.payoffs
    }

    /// Cumulative regret after each step.
    pub fn cumulative_regret(&self) -> &[f64] {
        &self.cumulative_regret
    }

    pub fn final_regret(&self) -> f64 {
        *self.cumulative_regret.last().expect("horizon is positive")
    }

    pub fn episodes(&self) -> &[ServedEpisode] {
        &self.episodes
    }

    /// The reference assortment used for regret.
    pub fn optimal_assortment(&self) -> &[usize] {
        &self.optimal_assortment
    }

    pub fn optimal_value(&self) -> f64 {
        self.optimal_value
    }

    /// True when the reference assortment came from local search rather than
    /// exhaustive enumeration; regret may then dip negative at some steps.
    pub fn approx_optimum(&self) -> bool {
        self.approx_optimum
    }

    fn episode_at(&self, step: usize) -> &ServedEpisode {
        debug_assert!(step < self.horizon());
        let pos = self.episodes.partition_point(|e| e.start <= step);
        &self.episodes[pos - 1]
    }

    /// Assortment served at a zero-based step index.
    pub fn served_at(&self, step: usize) -> &[usize] {
        &self.episode_at(step).assortment
    }

    /// True risk value of the assortment served at a zero-based step index.
    pub fn risk_value_at(&self, step: usize) -> f64 {
        self.episode_at(step).risk_value
    }
}

/// Reference optimum for regret measurement: exhaustive when the product
/// count fits under the enumeration cap, otherwise the best of a climb from
/// the empty set and four seeded random restarts (the restart stream is a
/// fixed constant, so the reference is stable across runs).
fn reference_optimum(
    instance: &Instance,
    criterion: &RiskCriterion,
) -> Result<(Vec<usize>, f64, bool)> {
    let (v, r, k) = (
        instance.preferences(),
        instance.profits(),
        instance.cardinality_limit(),
    );
    if instance.n_products() <= DEFAULT_ENUMERATION_CAP {
        let exact = optimize_exact(v, r, k, criterion)?;
        return Ok((exact.assortment, exact.value, false));
    }
    let mut best = optimize_local(v, r, k, criterion, &[])?;
    let mut restart_rng = derive_rng(0x5ee4_0f57, &[PURPOSE_VERIFY]);
    for _ in 0..4 {
        let candidate = optimize_local_random_init(v, r, k, criterion, &mut restart_rng)?;
        if candidate.value > best.value {
            best = candidate;
        }
    }
    Ok((best.assortment, best.value, true))
}

/// Runs an arbitrary policy against the environment for `horizon` steps,
/// measuring regret under `criterion`.
pub fn run_with_policy(
    instance: &Instance,
    policy: &mut dyn Policy,
    criterion: &RiskCriterion,
    horizon: usize,
    rng: &mut SimRng,
) -> Result<Trajectory> {
    if horizon == 0 {
        return Err(Error::InvalidInput("horizon must be at least 1".into()));
    }
    criterion.validate()?;
    let (optimal_assortment, optimal_value, approx_optimum) =
        reference_optimum(instance, criterion)?;

    let mut payoffs = Vec::with_capacity(horizon);
    let mut cumulative_regret = Vec::with_capacity(horizon);
    let mut episodes = Vec::new();
    let mut regret = 0.0;
    let mut steps = 0usize;

    while steps < horizon {
        let assortment = policy.select_assortment(rng)?;
        let f = RewardDistribution::from_assortment(
            &assortment,
            instance.preferences(),
            instance.profits(),
        )?;
        let risk_value = criterion.evaluate(&f)?;
        let gap = optimal_value - risk_value;
        let episode = run_episode(&assortment, instance, rng, horizon - steps)?;
        for &payoff in &episode.realized_payoffs {
            regret += gap;
            payoffs.push(payoff);
            cumulative_regret.push(regret);
        }
        episodes.push(ServedEpisode {
            assortment,
            start: steps,
            length: episode.length,
            risk_value,
            truncated: episode.truncated_by_horizon,
        });
        steps += episode.length;
        policy.observe_episode(&episode)?;
    }

    Ok(Trajectory {
        payoffs,
        cumulative_regret,
        episodes,
        optimal_assortment,
        optimal_value,
        approx_optimum,
    })
}

/// Runs one of the built-in algorithms for `horizon` steps.
///
/// `criterion` is both the experiment's measurement criterion and the
/// objective of the risk-aware agents; baselines optimize the mean instead
/// but their regret is still measured under `criterion`.
pub fn run_simulation(
    instance: &Instance,
    algorithm: Algorithm,
    criterion: &RiskCriterion,
    horizon: usize,
    optimizer_mode: OptimizerMode,
    rng: &mut SimRng,
) -> Result<Trajectory> {
    let mut agent = AgentState::new(
        algorithm,
        criterion.clone(),
        instance.profits().to_vec(),
        instance.cardinality_limit(),
        horizon,
        instance.cardinality_limit().max(1),
        optimizer_mode,
    )?;
    run_with_policy(instance, &mut agent, criterion, horizon, rng)
}

/// Empirical risk of each consecutive disjoint window of realized payoffs;
/// a trailing partial window is dropped.
pub fn rolling_risk(
    trajectory: &Trajectory,
    criterion: &RiskCriterion,
    window: usize,
) -> Result<Vec<f64>> {
    rolling_risk_of_payoffs(trajectory.payoffs(), criterion, window)
}

/// Same as [`rolling_risk`], over a raw payoff sequence.
pub fn rolling_risk_of_payoffs(
    payoffs: &[f64],
    criterion: &RiskCriterion,
    window: usize,
) -> Result<Vec<f64>> {
    if window == 0 {
        return Err(Error::InvalidParameter(
            "rolling window must be at least 1".into(),
        ));
    }
    if window > payoffs.len() {
        return Err(Error::InvalidInput(format!(
            "rolling window {window} exceeds {} recorded steps",
            payoffs.len()
        )));
    }
    payoffs
        .chunks_exact(window)
        .map(|chunk| criterion.empirical_evaluate(chunk))
        .collect()
}

/// Aggregated regret curves at a set of checkpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct AggregateCurve {
    /// One-based step indices at which the curves are sampled.
    pub checkpoints: Vec<usize>,
    /// Mean regret over repetitions, per instance.
    pub per_instance_mean: Vec<Vec<f64>>,
    /// Pointwise maximum of the per-instance means.
    pub worst: Vec<f64>,
}

/// Checkpoint grid for a horizon: every step up to
/// [`FULL_RESOLUTION_HORIZON`], otherwise 1000 evenly spaced steps plus the
/// first and the last.
pub fn checkpoint_grid(horizon: usize) -> Vec<usize> {
    if horizon <= FULL_RESOLUTION_HORIZON {
        return (1..=horizon).collect();
    }
    let mut grid = std::collections::BTreeSet::new();
    grid.insert(1);
    grid.insert(horizon);
    for i in 1..=1000u128 {
        let t = (i * horizon as u128 / 1000) as usize;
        grid.insert(t.max(1));
    }
    grid.into_iter().collect()
}

/// Means per-repetition curves within each instance, then takes the
/// pointwise worst (maximum) across instances, sampling at `checkpoints`.
///
/// `per_instance` holds full per-step cumulative regret curves indexed as
/// `[instance][repetition][step]`; all curves must share one horizon and the
/// checkpoints must lie within it.
pub fn aggregate(per_instance: &[Vec<Vec<f64>>], checkpoints: &[usize]) -> Result<AggregateCurve> {
    if per_instance.is_empty() || per_instance.iter().any(|reps| reps.is_empty()) {
        return Err(Error::InvalidInput(
            "aggregation needs at least one curve per instance".into(),
        ));
    }
    let horizon = per_instance[0][0].len();
    for reps in per_instance {
        for curve in reps {
            if curve.len() != horizon {
                return Err(Error::InvalidInput(format!(
                    "curve length {} does not match horizon {horizon}",
                    curve.len()
                )));
            }
        }
    }
    for &t in checkpoints {
        if t == 0 || t > horizon {
            return Err(Error::InvalidInput(format!(
                "checkpoint {t} outside 1..={horizon}"
            )));
        }
    }
    let per_instance_mean: Vec<Vec<f64>> = per_instance
        .iter()
        .map(|reps| {
            checkpoints
                .iter()
                .map(|&t| reps.iter().map(|curve| curve[t - 1]).sum::<f64>() / reps.len() as f64)
                .collect()
        })
        .collect();
    let worst = (0..checkpoints.len())
        .map(|ci| {
            per_instance_mean
                .iter()
                .map(|curve| curve[ci])
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    Ok(AggregateCurve {
        checkpoints: checkpoints.to_vec(),
        per_instance_mean,
        worst,
    })
}

/// Aggregated results of one algorithm across instances and repetitions.
#[derive(Clone, Debug)]
pub struct AlgorithmResult {
    pub algorithm: Algorithm,
    pub curve: AggregateCurve,
    /// Rolling empirical risk per window, averaged over instances and
    /// repetitions; present when the config sets a rolling window.
    pub rolling_mean: Option<Vec<f64>>,
}

/// Everything an experiment produces.
#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub config: ExperimentConfig,
    pub instances: Vec<Instance>,
    pub per_algorithm: Vec<AlgorithmResult>,
}

/// Stable substream tag per algorithm, independent of config order.
fn algorithm_stream_tag(algorithm: Algorithm) -> u64 {
    match algorithm {
        Algorithm::RiskUcb => 0,
        Algorithm::RiskTs => 1,
        Algorithm::BaselineUcb => 2,
        Algorithm::BaselineTs => 3,
    }
}

/// Runs the full experiment described by `config`.
///
/// Simulations are distributed over the current rayon thread pool; results
/// are deterministic regardless of scheduling.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    let instances: Vec<Instance> = (0..config.instance_count)
        .map(|j| {
            let mut rng = derive_rng(config.master_seed, &[PURPOSE_INSTANCE, j as u64]);
            generate_instance(config.n_products, config.cardinality_limit, &mut rng)
        })
        .collect::<Result<_>>()?;
    let checkpoints = checkpoint_grid(config.horizon);

    let mut jobs = Vec::new();
    for &algorithm in &config.algorithms {
        for instance_idx in 0..config.instance_count {
            for rep in 0..config.repetitions {
                jobs.push((algorithm, instance_idx, rep));
            }
        }
    }

    let runs: Vec<(Vec<f64>, Option<Vec<f64>>)> = jobs
        .par_iter()
        .map(|&(algorithm, instance_idx, rep)| {
            let mut rng = derive_rng(
                config.master_seed,
                &[
                    PURPOSE_SIMULATION,
                    algorithm_stream_tag(algorithm),
                    instance_idx as u64,
                    rep as u64,
                ],
            );
            let trajectory = run_simulation(
                &instances[instance_idx],
                algorithm,
                &config.criterion,
                config.horizon,
                config.optimizer_mode,
                &mut rng,
            )?;
            let sampled: Vec<f64> = checkpoints
                .iter()
                .map(|&t| trajectory.cumulative_regret()[t - 1])
                .collect();
            let rolling = match config.rolling_window {
                Some(window) => Some(rolling_risk(&trajectory, &config.criterion, window)?),
                None => None,
            };
            Ok((sampled, rolling))
        })
        .collect::<Result<_>>()?;

    let mut per_algorithm = Vec::with_capacity(config.algorithms.len());
    let runs_per_algo = config.instance_count * config.repetitions;
    for (ai, &algorithm) in config.algorithms.iter().enumerate() {
        let algo_runs = &runs[ai * runs_per_algo..(ai + 1) * runs_per_algo];
        let mut per_instance_mean = Vec::with_capacity(config.instance_count);
        for instance_idx in 0..config.instance_count {
            let reps =
                &algo_runs[instance_idx * config.repetitions..(instance_idx + 1) * config.repetitions];
            let mean: Vec<f64> = (0..checkpoints.len())
                .map(|ci| {
                    reps.iter().map(|(curve, _)| curve[ci]).sum::<f64>() / reps.len() as f64
                })
                .collect();
            per_instance_mean.push(mean);
        }
        let worst: Vec<f64> = (0..checkpoints.len())
            .map(|ci| {
                per_instance_mean
                    .iter()
                    .map(|curve| curve[ci])
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect();
        let rolling_mean = config.rolling_window.map(|window| {
            let windows = config.horizon / window;
            (0..windows)
                .map(|wi| {
                    algo_runs
                        .iter()
                        .map(|(_, rolling)| rolling.as_ref().expect("configured")[wi])
                        .sum::<f64>()
                        / algo_runs.len() as f64
                })
                .collect()
        });
        per_algorithm.push(AlgorithmResult {
            algorithm,
            curve: AggregateCurve {
                checkpoints: checkpoints.clone(),
                per_instance_mean,
                worst,
            },
            rolling_mean,
        });
    }

    Ok(ExperimentOutput {
        config: config.clone(),
        instances,
        per_algorithm,
    })
}

/// Decimal with 17 significant digits; round-trips every f64 exactly.
fn format_full_precision(x: f64) -> String {
    format!("{x:.16e}")
}

/// Regret results as CSV with header
/// `algo,instance,checkpoint_t,mean_regret,worst_regret`.
pub fn results_csv(output: &ExperimentOutput) -> String {
    let mut csv = String::from("algo,instance,checkpoint_t,mean_regret,worst_regret\n");
    for result in &output.per_algorithm {
        for (instance_idx, mean_curve) in result.curve.per_instance_mean.iter().enumerate() {
            for (ci, &t) in result.curve.checkpoints.iter().enumerate() {
                writeln!(
                    csv,
                    "{},{},{},{},{}",
                    result.algorithm,
                    instance_idx,
                    t,
                    format_full_precision(mean_curve[ci]),
                    format_full_precision(result.curve.worst[ci]),
                )
                .expect("writing to a string cannot fail");
            }
        }
    }
    csv
}

/// Rolling-risk results as CSV with header `algo,window_index,value`, if the
/// experiment tracked rolling risk.
pub fn rolling_csv(output: &ExperimentOutput) -> Option<String> {
    output.config.rolling_window?;
    let mut csv = String::from("algo,window_index,value\n");
    for result in &output.per_algorithm {
        let rolling = result.rolling_mean.as_ref().expect("configured");
        for (wi, &value) in rolling.iter().enumerate() {
            writeln!(
                csv,
                "{},{},{}",
                result.algorithm,
                wi,
                format_full_precision(value)
            )
            .expect("writing to a string cannot fail");
        }
    }
    Some(csv)
}

/// Writes `results.csv`, `rolling.csv` (when tracked), and the generated
/// instances into `dir`; returns the created paths.
pub fn write_output_files(output: &ExperimentOutput, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();

    let results_path = dir.join("results.csv");
    std::fs::write(&results_path, results_csv(output))?;
    written.push(results_path);

    if let Some(csv) = rolling_csv(output) {
        let rolling_path = dir.join("rolling.csv");
        std::fs::write(&rolling_path, csv)?;
        written.push(rolling_path);
    }

    for (idx, instance) in output.instances.iter().enumerate() {
        let path = dir.join(format!("instance_{idx:03}.json"));
        instance.save(&path)?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::FixedAssortmentPolicy;

    fn small_instance() -> Instance {
        Instance::new(
            vec![0.8, 0.3, 0.6, 0.1],
            vec![0.9, 0.4, 0.2, 0.7],
            2,
        )
        .unwrap()
    }

    #[test]
    fn instance_generation_is_deterministic() {
        let mut a = derive_rng(31, &[PURPOSE_INSTANCE, 0]);
        let mut b = derive_rng(31, &[PURPOSE_INSTANCE, 0]);
        let ia = generate_instance(6, 3, &mut a).unwrap();
        let ib = generate_instance(6, 3, &mut b).unwrap();
        assert_eq!(ia, ib);
        let single = generate_instance(1, 1, &mut a).unwrap();
        assert_eq!(single.n_products(), 1);
    }

    #[test]
    fn instance_generation_matches_uniform_moments() {
        let mut rng = derive_rng(32, &[PURPOSE_INSTANCE, 1]);
        let draws = 10_000;
        let mut v_sum = 0.0;
        let mut r_sum = 0.0;
        for _ in 0..draws {
            let inst = generate_instance(1, 1, &mut rng).unwrap();
            v_sum += inst.preferences()[0];
            r_sum += inst.profits()[0];
        }
        let v_mean = v_sum / draws as f64;
        let r_mean = r_sum / draws as f64;
        assert!((0.49..=0.51).contains(&v_mean), "v mean {v_mean}");
        assert!((0.54..=0.56).contains(&r_mean), "r mean {r_mean}");
    }

    #[test]
    fn oracle_policy_accumulates_zero_regret() {
        let instance = small_instance();
        let criterion = RiskCriterion::cvar(0.5).unwrap();
        let optimum = optimize_exact(
            instance.preferences(),
            instance.profits(),
            instance.cardinality_limit(),
            &criterion,
        )
        .unwrap();
        let mut policy = FixedAssortmentPolicy::new(optimum.assortment.clone());
        let mut rng = derive_rng(33, &[PURPOSE_SIMULATION, 9]);
        let trajectory =
            run_with_policy(&instance, &mut policy, &criterion, 2000, &mut rng).unwrap();
        assert_eq!(trajectory.horizon(), 2000);
        assert!(trajectory.final_regret().abs() < 1e-9);
        assert!(!trajectory.approx_optimum());
        assert_eq!(trajectory.optimal_assortment(), optimum.assortment);
    }

    #[test]
    fn worst_policy_accumulates_linear_regret() {
        let instance = small_instance();
        let criterion = RiskCriterion::mean();
        let n = instance.n_products();
        // Find the worst assortment by direct enumeration.
        let mut worst: Option<(f64, Vec<usize>)> = None;
        for mask in 0u32..(1 << n) {
            if (mask.count_ones() as usize) > instance.cardinality_limit() {
                continue;
            }
            let ids: Vec<usize> = (1..=n).filter(|i| mask & (1 << (i - 1)) != 0).collect();
            let f = RewardDistribution::from_assortment(
                &ids,
                instance.preferences(),
                instance.profits(),
            )
            .unwrap();
            let value = criterion.evaluate(&f).unwrap();
            if worst.as_ref().is_none_or(|(wv, _)| value < *wv) {
                worst = Some((value, ids));
            }
        }
        let (worst_value, worst_ids) = worst.unwrap();
        let mut policy = FixedAssortmentPolicy::new(worst_ids);
        let mut rng = derive_rng(34, &[PURPOSE_SIMULATION, 10]);
        let horizon = 1000;
        let trajectory =
            run_with_policy(&instance, &mut policy, &criterion, horizon, &mut rng).unwrap();
        let slope = trajectory.optimal_value() - worst_value;
        assert!(slope > 0.0);
        for t in [0, horizon / 2 - 1, horizon - 1] {
            let expected = slope * (t + 1) as f64;
            assert!(
                (trajectory.cumulative_regret()[t] - expected).abs() < 1e-9,
                "regret at {t} is {} expected {expected}",
                trajectory.cumulative_regret()[t]
            );
        }
    }

    #[test]
    fn trajectory_step_lookup_matches_episodes() {
        let instance = small_instance();
        let criterion = RiskCriterion::mean();
        let mut rng = derive_rng(35, &[PURPOSE_SIMULATION, 11]);
        let trajectory = run_simulation(
            &instance,
            Algorithm::RiskUcb,
            &criterion,
            500,
            OptimizerMode::Exact,
            &mut rng,
        )
        .unwrap();
        let mut step = 0;
        for episode in trajectory.episodes() {
            for offset in 0..episode.length {
                assert_eq!(trajectory.served_at(step + offset), episode.assortment);
                assert_eq!(trajectory.risk_value_at(step + offset), episode.risk_value);
            }
            step += episode.length;
        }
        assert_eq!(step, trajectory.horizon());
        // Regret never decreases when the reference optimum is exact.
        let regret = trajectory.cumulative_regret();
        for t in 1..regret.len() {
            assert!(regret[t] >= regret[t - 1] - 1e-9);
        }
    }

    #[test]
    fn rolling_risk_examples() {
        let criterion = RiskCriterion::cvar(0.5).unwrap();
        let constant = vec![0.5; 4000];
        let values = rolling_risk_of_payoffs(&constant, &criterion, 1000).unwrap();
        assert_eq!(values, vec![0.5; 4]);

        let values = rolling_risk_of_payoffs(&constant, &criterion, 4000).unwrap();
        assert_eq!(values.len(), 1);

        let alternating: Vec<f64> = (0..64).map(|i| (i % 2) as f64).collect();
        let values = rolling_risk_of_payoffs(&alternating, &criterion, 4).unwrap();
        assert!(values.iter().all(|&v| v == 0.0));

        assert!(matches!(
            rolling_risk_of_payoffs(&constant, &criterion, 0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            rolling_risk_of_payoffs(&constant, &criterion, 4001),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn aggregation_means_then_maxes() {
        let curve = |scale: f64, len: usize| -> Vec<f64> {
            (1..=len).map(|t| scale * t as f64).collect()
        };
        // Single instance, single repetition: identity at checkpoints.
        let agg = aggregate(&[vec![curve(1.0, 10)]], &[1, 5, 10]).unwrap();
        assert_eq!(agg.per_instance_mean[0], vec![1.0, 5.0, 10.0]);
        assert_eq!(agg.worst, vec![1.0, 5.0, 10.0]);

        // Two instances f and 2f: worst is 2f.
        let agg = aggregate(
            &[vec![curve(1.0, 10)], vec![curve(2.0, 10)]],
            &[2, 10],
        )
        .unwrap();
        assert_eq!(agg.worst, vec![4.0, 20.0]);

        // Mean over repetitions comes before the max over instances.
        let agg = aggregate(
            &[
                vec![curve(1.0, 10), curve(3.0, 10)],
                vec![curve(1.9, 10), curve(1.9, 10)],
            ],
            &[10],
        )
        .unwrap();
        assert_eq!(agg.per_instance_mean[0], vec![20.0]);
        assert_eq!(agg.per_instance_mean[1], vec![19.0]);
        assert_eq!(agg.worst, vec![20.0]);

        assert!(aggregate(&[vec![curve(1.0, 10)], vec![curve(1.0, 9)]], &[1]).is_err());
        assert!(aggregate(&[vec![curve(1.0, 10)]], &[11]).is_err());
    }

    #[test]
    fn aggregation_commutes_with_subsampling() {
        // Aggregating full curves then reading a checkpoint equals
        // aggregating at that checkpoint directly.
        let curves: Vec<Vec<Vec<f64>>> = (0..3)
            .map(|i| {
                (0..4)
                    .map(|j| {
                        (1..=50)
                            .map(|t| ((i * 7 + j * 3 + t) % 13) as f64 + t as f64 * 0.5)
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let full_grid: Vec<usize> = (1..=50).collect();
        let full = aggregate(&curves, &full_grid).unwrap();
        let sparse = aggregate(&curves, &[7, 20, 50]).unwrap();
        for (si, &t) in [7usize, 20, 50].iter().enumerate() {
            assert_eq!(sparse.worst[si], full.worst[t - 1]);
            for inst in 0..curves.len() {
                assert_eq!(
                    sparse.per_instance_mean[inst][si],
                    full.per_instance_mean[inst][t - 1]
                );
            }
        }
    }

    #[test]
    fn checkpoint_grid_shapes() {
        assert_eq!(checkpoint_grid(5), vec![1, 2, 3, 4, 5]);
        assert_eq!(checkpoint_grid(10_000).len(), 10_000);
        let grid = checkpoint_grid(100_000);
        assert!(grid.len() <= 1002);
        assert_eq!(grid[0], 1);
        assert_eq!(*grid.last().unwrap(), 100_000);
        assert!(grid.contains(&25_000));
        assert!(grid.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn experiment_is_deterministic_and_serializable() {
        let config = ExperimentConfig {
            n_products: 4,
            cardinality_limit: 2,
            horizon: 400,
            repetitions: 2,
            instance_count: 2,
            master_seed: 77,
            criterion: RiskCriterion::cvar(0.5).unwrap(),
            algorithms: vec![Algorithm::RiskUcb, Algorithm::BaselineTs],
            optimizer_mode: OptimizerMode::Exact,
            rolling_window: Some(100),
        };
        let parsed = ExperimentConfig::from_json_str(&config.to_json_string()).unwrap();
        assert_eq!(parsed, config);

        let a = run_experiment(&config).unwrap();
        let b = run_experiment(&config).unwrap();
        assert_eq!(results_csv(&a), results_csv(&b));
        assert_eq!(rolling_csv(&a), rolling_csv(&b));
        assert_eq!(a.instances, b.instances);

        let csv = results_csv(&a);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "algo,instance,checkpoint_t,mean_regret,worst_regret"
        );
        // algorithms * instances * checkpoints data rows
        assert_eq!(csv.lines().count(), 1 + 2 * 2 * 400);
        let rolling = rolling_csv(&a).unwrap();
        assert_eq!(rolling.lines().count(), 1 + 2 * 4);
    }

    #[test]
    fn config_validation_rejects_bad_windows() {
        let mut config = ExperimentConfig {
            n_products: 2,
            cardinality_limit: 1,
            horizon: 100,
            repetitions: 1,
            instance_count: 1,
            master_seed: 1,
            criterion: RiskCriterion::mean(),
            algorithms: vec![Algorithm::RiskUcb],
            optimizer_mode: OptimizerMode::Exact,
            rolling_window: Some(101),
        };
        assert!(config.validate().is_err());
        config.rolling_window = Some(0);
        assert!(config.validate().is_err());
        config.rolling_window = None;
        config.validate().unwrap();
    }
}
