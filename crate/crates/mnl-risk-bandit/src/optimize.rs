//! Risk-optimal assortment search under a cardinality constraint.
//!
//! [`optimize_exact`] enumerates every subset of size at most `K` and is the
//! reference optimizer for small product counts (at most
//! [`DEFAULT_ENUMERATION_CAP`] products unless a larger cap is passed
//! explicitly). Ties are broken toward the smallest cardinality and then the
//! lexicographically smallest id sequence, so the reported optimum is the
//! smallest optimal assortment.
//!
//! [`optimize_local`] is a steepest-ascent hill climb over the
//! add-one/delete-one/swap-one neighborhood, for product counts where
//! enumeration is not an option. It accepts the best strictly-improving
//! neighbor each round and stops at a certified local optimum: no single
//! move improves the value by more than [`IMPROVEMENT_THRESHOLD`].

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dist::{validate_assortment, validate_preference_vector, validate_profit_vector};
use crate::error::{Error, Result};
use crate::risk::{evaluate_atoms, RiskCriterion};

/// Largest product count accepted by [`optimize_exact`].
pub const DEFAULT_ENUMERATION_CAP: usize = 20;

/// Minimum value gain for a local-search move to count as an improvement;
/// prevents cycling on numerically tied neighbors.
pub const IMPROVEMENT_THRESHOLD: f64 = 1e-12;

/// Which optimizer the agents and the harness call per episode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OptimizerMode {
    Exact,
    Local,
}

impl fmt::Display for OptimizerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OptimizerMode::Exact => write!(f, "exact"),
            OptimizerMode::Local => write!(f, "local"),
        }
    }
}

impl FromStr for OptimizerMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(OptimizerMode::Exact),
            "local" => Ok(OptimizerMode::Local),
            other => Err(Error::Parse(format!("unknown optimizer mode `{other}`"))),
        }
    }
}

impl Serialize for OptimizerMode {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for OptimizerMode {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(deserializer)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// Outcome of an optimization run.
#[derive(Clone, Debug, PartialEq)]
pub struct OptimizationResult {
    /// Product ids of the chosen assortment, sorted ascending.
    pub assortment: Vec<usize>,
    /// Criterion value of the chosen assortment.
    pub value: f64,
    /// Number of criterion evaluations performed, for diagnostics.
    pub evaluations: u64,
}

/// Shared evaluation state: products sorted by profit once, so each subset
/// evaluation walks its atoms in payoff order without sorting or allocating.
struct SubsetEvaluator<'a> {
    preferences: &'a [f64],
    profits: &'a [f64],
    criterion: &'a RiskCriterion,
    /// Product ids sorted by ascending (profit, id).
    order: Vec<usize>,
    /// Rank in `order` of each product id.
    rank_of_id: Vec<usize>,
    ranks_buf: Vec<usize>,
    atoms_buf: Vec<(f64, f64)>,
    evaluations: u64,
}

impl<'a> SubsetEvaluator<'a> {
    fn new(
        preferences: &'a [f64],
        profits: &'a [f64],
        criterion: &'a RiskCriterion,
    ) -> Result<Self> {
        if preferences.len() != profits.len() {
            return Err(Error::InvalidInput(format!(
                "{} preferences but {} profits",
                preferences.len(),
                profits.len()
            )));
        }
        validate_preference_vector(preferences)?;
        validate_profit_vector(profits)?;
        criterion.validate()?;
        let n = preferences.len();
        let mut order: Vec<usize> = (1..=n).collect();
        order.sort_by(|&a, &b| profits[a - 1].total_cmp(&profits[b - 1]).then(a.cmp(&b)));
        let mut rank_of_id = vec![0usize; n];
        for (rank, &id) in order.iter().enumerate() {
            rank_of_id[id - 1] = rank;
        }
        Ok(Self {
            preferences,
            profits,
            criterion,
            order,
            rank_of_id,
            ranks_buf: Vec::with_capacity(n),
            atoms_buf: Vec::with_capacity(n + 1),
            evaluations: 0,
        })
    }

    /// Criterion value of the subset given as ascending ranks into `order`.
    fn value_of_ranks(&mut self, ranks: &[usize]) -> f64 {
        self.evaluations += 1;
        let mut denom = 1.0;
        for &t in ranks {
            denom += self.preferences[self.order[t] - 1];
        }
        self.atoms_buf.clear();
        self.atoms_buf.push((0.0, 1.0 / denom));
        for &t in ranks {
            let id = self.order[t];
            let profit = self.profits[id - 1];
            let mass = self.preferences[id - 1] / denom;
            match self.atoms_buf.last_mut() {
                Some(last) if last.0 == profit => last.1 += mass,
                _ => self.atoms_buf.push((profit, mass)),
            }
        }
        evaluate_atoms(self.criterion, &self.atoms_buf)
    }

    /// Criterion value of a subset given as product ids in any order.
    fn value_of_ids(&mut self, ids: &[usize]) -> f64 {
        let mut ranks = std::mem::take(&mut self.ranks_buf);
        ranks.clear();
        ranks.extend(ids.iter().map(|&id| self.rank_of_id[id - 1]));
        ranks.sort_unstable();
        let value = self.value_of_ranks(&ranks);
        self.ranks_buf = ranks;
        value
    }

    fn ids_of_ranks(&self, ranks: &[usize]) -> Vec<usize> {
        let mut ids: Vec<usize> = ranks.iter().map(|&t| self.order[t]).collect();
        ids.sort_unstable();
        ids
    }
}

/// Visits all size-`m` combinations of `0..n` in lexicographic order.
fn for_each_combination(n: usize, m: usize, mut visit: impl FnMut(&[usize])) {
    if m == 0 {
        visit(&[]);
        return;
    }
    if m > n {
        return;
    }
    let mut idx: Vec<usize> = (0..m).collect();
    loop {
        visit(&idx);
        let mut i = m - 1;
        while idx[i] == n - m + i {
            if i == 0 {
                return;
            }
            i -= 1;
        }
        idx[i] += 1;
        for j in i + 1..m {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Exhaustive search over all assortments of size at most `k`, with the
/// default enumeration cap.
pub fn optimize_exact(
    preferences: &[f64],
    profits: &[f64],
    k: usize,
    criterion: &RiskCriterion,
) -> Result<OptimizationResult> {
    optimize_exact_with_cap(preferences, profits, k, criterion, DEFAULT_ENUMERATION_CAP)
}

/// Exhaustive search with an explicit enumeration cap.
pub fn optimize_exact_with_cap(
    preferences: &[f64],
    profits: &[f64],
    k: usize,
    criterion: &RiskCriterion,
    cap: usize,
) -> Result<OptimizationResult> {
    let n = preferences.len();
    if n > cap {
        return Err(Error::EnumerationTooLarge { n_products: n, cap });
    }
    if k > n {
        return Err(Error::InvalidInput(format!(
            "cardinality limit {k} exceeds {n} products"
        )));
    }
    let mut evaluator = SubsetEvaluator::new(preferences, profits, criterion)?;
    let mut best_value = f64::NEG_INFINITY;
    let mut best_ids: Vec<usize> = Vec::new();
    // Sizes ascend and replacement needs strict improvement or an explicit
    // tie-break win, so the reported optimum is the smallest one.
    for size in 0..=k {
        for_each_combination(n, size, |ranks| {
            let value = evaluator.value_of_ranks(ranks);
            if value > best_value {
                best_value = value;
                best_ids = evaluator.ids_of_ranks(ranks);
            } else if value == best_value {
                let ids = evaluator.ids_of_ranks(ranks);
                if ids.len() < best_ids.len() || (ids.len() == best_ids.len() && ids < best_ids) {
                    best_ids = ids;
                }
            }
        });
    }
    Ok(OptimizationResult {
        assortment: best_ids,
        value: best_value,
        evaluations: evaluator.evaluations,
    })
}

/// Steepest-ascent local search from `init` over the add/delete/swap
/// neighborhood. Deterministic given `init`: the best strictly-improving
/// neighbor is taken each round, ties resolved by the fixed scan order
/// (deletions by ascending id, then additions by ascending id, then swaps by
/// ascending removed id and added id).
pub fn optimize_local(
    preferences: &[f64],
    profits: &[f64],
    k: usize,
    criterion: &RiskCriterion,
    init: &[usize],
) -> Result<OptimizationResult> {
    let n = preferences.len();
    if k > n {
        return Err(Error::InvalidInput(format!(
            "cardinality limit {k} exceeds {n} products"
        )));
    }
    validate_assortment(init, n)?;
    if init.len() > k {
        return Err(Error::InvalidInput(format!(
            "initial assortment has {} products, limit is {k}",
            init.len()
        )));
    }
    let mut evaluator = SubsetEvaluator::new(preferences, profits, criterion)?;
    let mut current: Vec<usize> = init.to_vec();
    current.sort_unstable();
    let mut current_value = evaluator.value_of_ids(&current);

    loop {
        let mut best_move: Option<(f64, Vec<usize>)> = None;
        let consider = |value: f64, candidate: Vec<usize>, best: &mut Option<(f64, Vec<usize>)>| {
            if value > current_value + IMPROVEMENT_THRESHOLD
                && best.as_ref().is_none_or(|(bv, _)| value > *bv)
            {
                *best = Some((value, candidate));
            }
        };

        for drop_pos in 0..current.len() {
            let mut candidate = current.clone();
            candidate.remove(drop_pos);
            let value = evaluator.value_of_ids(&candidate);
            consider(value, candidate, &mut best_move);
        }
        if current.len() < k {
            for id in 1..=n {
                if current.binary_search(&id).is_err() {
                    let mut candidate = current.clone();
                    candidate.insert(candidate.partition_point(|&x| x < id), id);
                    let value = evaluator.value_of_ids(&candidate);
                    consider(value, candidate, &mut best_move);
                }
            }
        }
        for drop_pos in 0..current.len() {
            for id in 1..=n {
                if current.binary_search(&id).is_err() {
                    let mut candidate = current.clone();
                    candidate.remove(drop_pos);
                    candidate.insert(candidate.partition_point(|&x| x < id), id);
                    let value = evaluator.value_of_ids(&candidate);
                    consider(value, candidate, &mut best_move);
                }
            }
        }

        match best_move {
            Some((value, candidate)) => {
                current = candidate;
                current_value = value;
            }
            None => break,
        }
    }

    Ok(OptimizationResult {
        assortment: current,
        value: current_value,
        evaluations: evaluator.evaluations,
    })
}

/// Local search from a uniformly random assortment of size `min(k, n)`.
///
/// Tail criteria score every small assortment zero (the no-purchase atom
/// dominates the worst quantiles), which makes the empty set a flat local
/// optimum; starting from a full-size random draw gets the climb moving.
pub fn optimize_local_random_init<R: Rng + ?Sized>(
    preferences: &[f64],
    profits: &[f64],
    k: usize,
    criterion: &RiskCriterion,
    rng: &mut R,
) -> Result<OptimizationResult> {
    let n = preferences.len();
    if k > n {
        return Err(Error::InvalidInput(format!(
            "cardinality limit {k} exceeds {n} products"
        )));
    }
    let size = k.min(n);
    let mut ids: Vec<usize> = (1..=n).collect();
    for i in 0..size {
        let j = rng.random_range(i..n);
        ids.swap(i, j);
    }
    ids.truncate(size);
    optimize_local(preferences, profits, k, criterion, &ids)
}
