//! Ground-truth environment: the multinomial logit choice model and the
//! serve-until-no-purchase episode loop.
//!
//! Given an assortment `S` and preference weights `v`, a customer buys
//! product `i ∈ S` with probability `v_i / (1 + Σ_{j∈S} v_j)` and buys
//! nothing (choice id 0) with probability `1 / (1 + Σ_{j∈S} v_j)`. An episode
//! serves the same assortment repeatedly until the first no-purchase outcome
//! or until the remaining horizon is exhausted; untruncated episode lengths
//! are geometric with success probability `1 / (1 + Σ_{i∈S} v_i)`.

use std::collections::BTreeMap;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dist::validate_assortment;
use crate::error::{Error, Result};

/// A bandit problem: preference weights, profits, and a cardinality limit.
///
/// Immutable after construction; shareable across threads.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    preferences: Vec<f64>,
    profits: Vec<f64>,
    cardinality_limit: usize,
}

/// On-disk shape of an instance: `{"n": N, "k": K, "v": [...], "r": [...]}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    n: usize,
    k: usize,
    v: Vec<f64>,
    r: Vec<f64>,
}

impl Instance {
    /// Validates and builds an instance.
    ///
    /// Requires equally long vectors, `v_i ∈ [0, 1]`, `r_i ∈ (0, 1]`, and a
    /// cardinality limit no larger than the number of products.
    pub fn new(preferences: Vec<f64>, profits: Vec<f64>, cardinality_limit: usize) -> Result<Self> {
        if preferences.len() != profits.len() {
            return Err(Error::InvalidInput(format!(
                "{} preferences but {} profits",
                preferences.len(),
                profits.len()
            )));
        }
        if preferences.is_empty() {
            return Err(Error::InvalidInput("instance has no products".into()));
        }
        if cardinality_limit > preferences.len() {
            return Err(Error::InvalidInput(format!(
                "cardinality limit {cardinality_limit} exceeds {} products",
                preferences.len()
            )));
        }
        for (i, &v) in preferences.iter().enumerate() {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidInput(format!(
                    "preference v_{} = {v} outside [0, 1]",
                    i + 1
                )));
            }
        }
        for (i, &r) in profits.iter().enumerate() {
            if !r.is_finite() || r <= 0.0 || r > 1.0 {
                return Err(Error::InvalidInput(format!(
                    "profit r_{} = {r} outside (0, 1]",
                    i + 1
                )));
            }
        }
        Ok(Self {
            preferences,
            profits,
            cardinality_limit,
        })
    }

    pub fn n_products(&self) -> usize {
        self.preferences.len()
    }

    pub fn cardinality_limit(&self) -> usize {
        self.cardinality_limit
    }

    pub fn preferences(&self) -> &[f64] {
        &self.preferences
    }

    pub fn profits(&self) -> &[f64] {
        &self.profits
    }

    pub fn from_json_str(json: &str) -> Result<Self> {
        let raw: RawInstance = serde_json::from_str(json)?;
        if raw.v.len() != raw.n || raw.r.len() != raw.n {
            return Err(Error::InvalidInput(format!(
                "instance declares n = {} but has {} preferences and {} profits",
                raw.n,
                raw.v.len(),
                raw.r.len()
            )));
        }
        Self::new(raw.v, raw.r, raw.k)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&RawInstance {
            n: self.n_products(),
            k: self.cardinality_limit,
            v: self.preferences.clone(),
            r: self.profits.clone(),
        })
        .expect("instance serialization cannot fail")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json_string() + "\n")?;
        Ok(())
    }
}

/// Outcome of one serve-until-no-purchase episode.
#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeResult {
    /// Number of serves, including the terminating no-purchase serve or the
    /// final serve before the horizon cut.
    pub length: usize,
    /// Purchase count per served product id (zero counts included).
    pub purchases: BTreeMap<usize, usize>,
    /// Payoff of each serve in order: the product profit on a purchase, zero
    /// on a no-purchase.
    pub realized_payoffs: Vec<f64>,
    /// True when the episode ended because the horizon ran out rather than
    /// because a no-purchase was observed.
    pub truncated_by_horizon: bool,
}

/// Choice probabilities for serving `s` under preferences `v`, keyed by
/// choice id with 0 for no-purchase.
pub fn choice_probabilities(s: &[usize], preferences: &[f64]) -> Result<BTreeMap<usize, f64>> {
    validate_assortment(s, preferences.len())?;
    let denom = 1.0 + s.iter().map(|&i| preferences[i - 1]).sum::<f64>();
    let mut probs = BTreeMap::new();
    probs.insert(0, 1.0 / denom);
    for &i in s {
        probs.insert(i, preferences[i - 1] / denom);
    }
    Ok(probs)
}

/// Samples one customer choice for assortment `s`; returns a product id or 0
/// for no-purchase. Deterministic given the generator state.
pub fn sample_choice<R: Rng + ?Sized>(
    s: &[usize],
    preferences: &[f64],
    rng: &mut R,
) -> Result<usize> {
    validate_assortment(s, preferences.len())?;
    let denom = 1.0 + s.iter().map(|&i| preferences[i - 1]).sum::<f64>();
    Ok(sample_choice_scaled(s, preferences, denom, rng))
}

/// Sampling core: one uniform draw on `[0, denom)` walked through the
/// cumulative weights `1, v_i, v_j, ...`.
fn sample_choice_scaled<R: Rng + ?Sized>(
    s: &[usize],
    preferences: &[f64],
    denom: f64,
    rng: &mut R,
) -> usize {
    let u = rng.random::<f64>() * denom;
    if u < 1.0 {
        return 0;
    }
    let mut cum = 1.0;
    for &i in s {
        cum += preferences[i - 1];
        if u < cum {
            return i;
        }
    }
    // Unreachable up to rounding at the top boundary; attribute to the last
    // product, or no-purchase for an empty assortment.
    s.last().copied().unwrap_or(0)
}

/// Serves `s` repeatedly until the first no-purchase or until
/// `remaining_horizon` serves have been used, whichever comes first.
pub fn run_episode<R: Rng + ?Sized>(
    s: &[usize],
    instance: &Instance,
    rng: &mut R,
    remaining_horizon: usize,
) -> Result<EpisodeResult> {
    if remaining_horizon == 0 {
        return Err(Error::InvalidInput(
            "remaining horizon must be at least 1".into(),
        ));
    }
    validate_assortment(s, instance.n_products())?;
    let v = instance.preferences();
    let denom = 1.0 + s.iter().map(|&i| v[i - 1]).sum::<f64>();
    let mut purchases: BTreeMap<usize, usize> = s.iter().map(|&i| (i, 0)).collect();
    let mut realized_payoffs = Vec::new();
    let mut length = 0;
    let truncated_by_horizon = loop {
        let choice = sample_choice_scaled(s, v, denom, rng);
        length += 1;
        if choice == 0 {
            realized_payoffs.push(0.0);
            break false;
        }
        realized_payoffs.push(instance.profits()[choice - 1]);
        *purchases.get_mut(&choice).expect("choice is in s") += 1;
        if length == remaining_horizon {
            break true;
        }
    };
    Ok(EpisodeResult {
        length,
        purchases,
        realized_payoffs,
        truncated_by_horizon,
    })
}
