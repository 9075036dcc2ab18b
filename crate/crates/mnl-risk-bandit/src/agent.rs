//! Learning policies: the risk-aware UCB and Thompson-sampling agents and
//! their expected-revenue baselines.
//!
//! Both agents work in episodes: an assortment is chosen from inflated
//! preference estimates, served until the first no-purchase outcome (or the
//! horizon cut), and the per-product statistics `T_i` (episodes served) and
//! `n_i` (total purchases) are updated from the episode counts. The mean
//! estimate `n_i / T_i` is unbiased for the true preference weight.
//!
//! The UCB agent inflates each estimate by a confidence bonus,
//!
//! ```text
//! ṽ_i = min{ v̄_i + sqrt(v̄_i · 48 ln(√N ℓ + 1) / T_i) + 48 ln(√N ℓ + 1) / T_i , 1 }
//! ```
//!
//! with `ṽ_i = 1` while product `i` is still unserved. The Thompson-sampling
//! agent first warm-starts by serving every product once as a singleton, then
//! each episode draws `sample_count` shared standard normals (correlated
//! sampling: one draw set per episode, not per product) and takes
//!
//! ```text
//! ṽ_i = max_j { v̄_i + θ^(j) σ̂_i },   σ̂_i = sqrt(50 v̄_i (v̄_i + 1) / T_i) + 75 sqrt(ln(T · sample_count)) / T_i,
//! ```
//!
//! clamped into `[0, 1]` so the resulting choice model stays valid. The
//! baselines `ucb`/`ts` are the same machinery with the objective fixed to
//! the mean criterion.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dist::validate_profit_vector;
use crate::env::EpisodeResult;
use crate::error::{Error, Result};
use crate::optimize::{
    optimize_exact_with_cap, optimize_local_random_init, OptimizerMode, DEFAULT_ENUMERATION_CAP,
};
use crate::risk::RiskCriterion;

/// The learning policies exposed by the harness and CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Risk-aware UCB.
    RiskUcb,
    /// Risk-aware Thompson sampling.
    RiskTs,
    /// UCB maximizing expected revenue, regardless of the experiment criterion.
    BaselineUcb,
    /// Thompson sampling maximizing expected revenue.
    BaselineTs,
}

impl Algorithm {
    pub fn is_thompson(self) -> bool {
        matches!(self, Algorithm::RiskTs | Algorithm::BaselineTs)
    }

    pub fn is_baseline(self) -> bool {
        matches!(self, Algorithm::BaselineUcb | Algorithm::BaselineTs)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Algorithm::RiskUcb => "risk-ucb",
            Algorithm::RiskTs => "risk-ts",
            Algorithm::BaselineUcb => "ucb",
            Algorithm::BaselineTs => "ts",
        };
        write!(f, "{name}")
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "risk-ucb" => Ok(Algorithm::RiskUcb),
            "risk-ts" => Ok(Algorithm::RiskTs),
            "ucb" => Ok(Algorithm::BaselineUcb),
            "ts" => Ok(Algorithm::BaselineTs),
            other => Err(Error::Parse(format!("unknown algorithm `{other}`"))),
        }
    }
}

impl Serialize for Algorithm {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Algorithm {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(deserializer)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// Per-product episode statistics.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ProductStats {
    /// Number of episodes in which the product was served (`T_i`).
    pub episodes_served: u64,
    /// Total purchases across those episodes (`n_i`).
    pub total_purchases: u64,
}

impl ProductStats {
    /// `n_i / T_i`, defined as zero while the product is unserved.
    pub fn mean_estimate(&self) -> f64 {
        self.total_purchases as f64 / self.episodes_served.max(1) as f64
    }
}

/// Where an agent is inside the episode loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Selecting,
    Serving,
}

/// UCB optimistic preference estimates for episode `episode_index` (1-based).
///
/// Unserved products get the full optimistic weight 1.
pub fn ucb_optimistic_params(stats: &[ProductStats], episode_index: usize) -> Vec<f64> {
    debug_assert!(episode_index >= 1);
    let n = stats.len() as f64;
    let log_term = 48.0 * (n.sqrt() * episode_index as f64 + 1.0).ln();
    stats
        .iter()
        .map(|st| {
            if st.episodes_served == 0 {
                return 1.0;
            }
            let t = st.episodes_served.max(1) as f64;
            let vbar = st.mean_estimate();
            let bonus = log_term / t;
            (vbar + (vbar * bonus).sqrt() + bonus).min(1.0)
        })
        .collect()
}

/// Thompson-sampling virtual preferences from a caller-supplied noise vector,
/// one standard-normal draw per sample index shared across products.
///
/// Requires a completed warm start (every product served at least once) and a
/// non-empty noise vector. Values are clamped into `[0, 1]`.
pub fn ts_virtual_params_with_noise(
    stats: &[ProductStats],
    noise: &[f64],
    horizon: usize,
) -> Result<Vec<f64>> {
    if noise.is_empty() {
        return Err(Error::InvalidInput(
            "correlated sampling needs at least one noise draw".into(),
        ));
    }
    if stats.iter().any(|st| st.episodes_served == 0) {
        return Err(Error::InvalidInput(
            "virtual parameters require every product to have been served once".into(),
        ));
    }
    let log_term = (horizon as f64 * noise.len() as f64).ln().sqrt();
    Ok(stats
        .iter()
        .map(|st| {
            let t = st.episodes_served as f64;
            let vbar = st.mean_estimate();
            let sigma = (50.0 * vbar * (vbar + 1.0) / t).sqrt() + 75.0 * log_term / t;
            let best = noise
                .iter()
                .map(|&theta| vbar + theta * sigma)
                .fold(f64::NEG_INFINITY, f64::max);
            best.clamp(0.0, 1.0)
        })
        .collect())
}

/// Thompson-sampling virtual preferences, drawing `sample_count` standard
/// normals from `rng`.
pub fn ts_virtual_params<R: Rng + ?Sized>(
    stats: &[ProductStats],
    rng: &mut R,
    sample_count: usize,
    horizon: usize,
) -> Result<Vec<f64>> {
    let noise: Vec<f64> = (0..sample_count)
        .map(|_| StandardNormal.sample(rng))
        .collect();
    ts_virtual_params_with_noise(stats, &noise, horizon)
}

/// A strategy the simulation loop can drive: pick an assortment, then absorb
/// the episode outcome.
pub trait Policy {
    fn select_assortment(&mut self, rng: &mut dyn RngCore) -> Result<Vec<usize>>;
    fn observe_episode(&mut self, result: &EpisodeResult) -> Result<()>;
}

/// Serves the same assortment every episode; useful as an oracle or
/// worst-case reference policy.
#[derive(Clone, Debug)]
pub struct FixedAssortmentPolicy {
    assortment: Vec<usize>,
}

impl FixedAssortmentPolicy {
    pub fn new(mut assortment: Vec<usize>) -> Self {
        assortment.sort_unstable();
        Self { assortment }
    }
}

impl Policy for FixedAssortmentPolicy {
    fn select_assortment(&mut self, _rng: &mut dyn RngCore) -> Result<Vec<usize>> {
        Ok(self.assortment.clone())
    }

    fn observe_episode(&mut self, _result: &EpisodeResult) -> Result<()> {
        Ok(())
    }
}

/// Episode-loop state of a learning agent.
#[derive(Clone, Debug)]
pub struct AgentState {
    algorithm: Algorithm,
    criterion: RiskCriterion,
    profits: Vec<f64>,
    cardinality_limit: usize,
    horizon: usize,
    sample_count: usize,
    optimizer_mode: OptimizerMode,
    enumeration_cap: usize,
    stats: Vec<ProductStats>,
    episode_index: usize,
    phase: Phase,
    current_assortment: Option<Vec<usize>>,
}

impl AgentState {
    /// Creates an agent for a problem with the given profits and cardinality
    /// limit. Baseline algorithms replace `criterion` with the mean.
    ///
    /// `horizon` is the total number of time steps (required by Thompson
    /// sampling's noise scale) and `sample_count` the number of correlated
    /// normal draws per episode, conventionally the cardinality limit.
    pub fn new(
        algorithm: Algorithm,
        criterion: RiskCriterion,
        profits: Vec<f64>,
        cardinality_limit: usize,
        horizon: usize,
        sample_count: usize,
        optimizer_mode: OptimizerMode,
    ) -> Result<Self> {
        validate_profit_vector(&profits)?;
        criterion.validate()?;
        if cardinality_limit > profits.len() {
            return Err(Error::InvalidInput(format!(
                "cardinality limit {cardinality_limit} exceeds {} products",
                profits.len()
            )));
        }
        if horizon == 0 {
            return Err(Error::InvalidInput("horizon must be at least 1".into()));
        }
        if sample_count == 0 {
            return Err(Error::InvalidParameter(
                "sample count must be at least 1".into(),
            ));
        }
        let criterion = if algorithm.is_baseline() {
            RiskCriterion::mean()
        } else {
            criterion
        };
        let n = profits.len();
        Ok(Self {
            algorithm,
            criterion,
            profits,
            cardinality_limit,
            horizon,
            sample_count,
            optimizer_mode,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
            stats: vec![ProductStats::default(); n],
            episode_index: 1,
            phase: Phase::Selecting,
            current_assortment: None,
        })
    }

    /// Overrides the exact-enumeration cap.
    pub fn with_enumeration_cap(mut self, cap: usize) -> Self {
        self.enumeration_cap = cap;
        self
    }

    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    /// The criterion the agent optimizes (the mean for baselines).
    pub fn objective(&self) -> &RiskCriterion {
        &self.criterion
    }

    pub fn stats(&self) -> &[ProductStats] {
        &self.stats
    }

    /// 1-based index of the upcoming (while selecting) or current (while
    /// serving) episode.
    pub fn episode_index(&self) -> usize {
        self.episode_index
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    /// The assortment being served, if the agent is mid-episode.
    pub fn current_assortment(&self) -> Option<&[usize]> {
        self.current_assortment.as_deref()
    }

    /// Picks the assortment for the next episode and moves to the serving
    /// phase.
    ///
    /// Thompson-sampling agents serve the lowest-id unserved product as a
    /// singleton until the warm start completes; afterwards (and always, for
    /// UCB) the inflated preference estimates go through the configured
    /// optimizer.
    pub fn begin_episode(&mut self, rng: &mut dyn RngCore) -> Result<Vec<usize>> {
        if self.phase != Phase::Selecting {
            return Err(Error::Phase(
                "begin_episode called while an episode is being served".into(),
            ));
        }
        let assortment = if self.algorithm.is_thompson() {
            match self.stats.iter().position(|st| st.episodes_served == 0) {
                Some(unserved) => vec![unserved + 1],
                None => {
                    let virt =
                        ts_virtual_params(&self.stats, rng, self.sample_count, self.horizon)?;
                    self.optimize(&virt, rng)?
                }
            }
        } else {
            let virt = ucb_optimistic_params(&self.stats, self.episode_index);
            self.optimize(&virt, rng)?
        };
        self.current_assortment = Some(assortment.clone());
        self.phase = Phase::Serving;
        Ok(assortment)
    }

    /// Folds an episode outcome into the statistics and moves back to the
    /// selecting phase.
    pub fn end_episode(&mut self, result: &EpisodeResult) -> Result<()> {
        if self.phase != Phase::Serving {
            return Err(Error::Phase(
                "end_episode called with no episode in progress".into(),
            ));
        }
        let served = self
            .current_assortment
            .as_ref()
            .expect("serving phase always has an assortment");
        for &product in result.purchases.keys() {
            if served.binary_search(&product).is_err() {
                return Err(Error::Inconsistent(format!(
                    "episode reports product {product} which was not served"
                )));
            }
        }
        for &product in served {
            let st = &mut self.stats[product - 1];
            st.episodes_served += 1;
            st.total_purchases += result.purchases.get(&product).copied().unwrap_or(0) as u64;
        }
        self.current_assortment = None;
        self.episode_index += 1;
        self.phase = Phase::Selecting;
        Ok(())
    }

    /// Runs the configured optimizer on the inflated preferences. Local mode
    /// climbs from a random full-size assortment drawn from `rng`.
    fn optimize(&self, virtual_preferences: &[f64], rng: &mut dyn RngCore) -> Result<Vec<usize>> {
        let result = match self.optimizer_mode {
            OptimizerMode::Exact => optimize_exact_with_cap(
                virtual_preferences,
                &self.profits,
                self.cardinality_limit,
                &self.criterion,
                self.enumeration_cap,
            )?,
            OptimizerMode::Local => optimize_local_random_init(
                virtual_preferences,
                &self.profits,
                self.cardinality_limit,
                &self.criterion,
                rng,
            )?,
        };
        Ok(result.assortment)
    }
}

impl Policy for AgentState {
    fn select_assortment(&mut self, rng: &mut dyn RngCore) -> Result<Vec<usize>> {
        self.begin_episode(rng)
    }

    fn observe_episode(&mut self, result: &EpisodeResult) -> Result<()> {
        self.end_episode(result)
    }
}
