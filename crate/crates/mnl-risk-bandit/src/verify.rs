//! Named property suites runnable from the CLI.
//!
//! Each suite samples randomized problems from a seeded stream and checks an
//! inequality that the rest of the crate relies on: criterion boundedness and
//! the one-sided Lipschitz bounds, quasiconvexity under mixtures, monotone
//! growth of the optimal value in the preferences, agreement of the two
//! conditional value-at-risk definitions, and the geometric law of episode
//! lengths. A suite fails if any sampled check is violated.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::dist::RewardDistribution;
use crate::env::{run_episode, Instance};
use crate::error::{Error, Result};
use crate::optimize::optimize_exact;
use crate::risk::RiskCriterion;
use crate::seeding::{derive_rng, SimRng, PURPOSE_VERIFY};

/// Seed used by `verify` when none is given.
pub const DEFAULT_VERIFY_SEED: u64 = 20210;

/// The available property suites.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    /// Boundedness and the one-sided Lipschitz bounds, in both the
    /// base-denominator and raised-denominator forms, plus the
    /// total-variation bound on the choice probabilities themselves.
    Lipschitz,
    /// Mixture quasiconvexity for every criterion, value-at-risk included.
    Quasiconvex,
    /// The optimal value never drops when preferences rise.
    MonotoneMax,
    /// Sorted-atom conditional value-at-risk equals its integral form.
    CvarDual,
    /// Episode lengths are geometric with mean `1 + Σ v_i`.
    EpisodeGeom,
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Suite::Lipschitz => "lipschitz",
            Suite::Quasiconvex => "quasiconvex",
            Suite::MonotoneMax => "monotone-max",
            Suite::CvarDual => "cvar-dual",
            Suite::EpisodeGeom => "episode-geom",
        };
        write!(f, "{name}")
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lipschitz" => Ok(Suite::Lipschitz),
            "quasiconvex" => Ok(Suite::Quasiconvex),
            "monotone-max" => Ok(Suite::MonotoneMax),
            "cvar-dual" => Ok(Suite::CvarDual),
            "episode-geom" => Ok(Suite::EpisodeGeom),
            other => Err(Error::Parse(format!(
                "unknown suite `{other}`; expected lipschitz | quasiconvex | monotone-max | cvar-dual | episode-geom"
            ))),
        }
    }
}

/// Outcome of a suite run.
#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: u64,
    pub violations: u64,
    pub details: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in &self.details {
            writeln!(f, "  {line}")?;
        }
        write!(
            f,
            "suite {}: {} checks, {} violations: {}",
            self.suite,
            self.checks,
            self.violations,
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

/// Runs one suite with the given seed.
pub fn run_suite(suite: Suite, seed: u64) -> Result<SuiteReport> {
    let mut rng = derive_rng(seed, &[PURPOSE_VERIFY, suite_tag(suite)]);
    match suite {
        Suite::Lipschitz => lipschitz_suite(&mut rng),
        Suite::Quasiconvex => quasiconvex_suite(&mut rng),
        Suite::MonotoneMax => monotone_max_suite(&mut rng),
        Suite::CvarDual => cvar_dual_suite(&mut rng),
        Suite::EpisodeGeom => episode_geom_suite(&mut rng),
    }
}

fn suite_tag(suite: Suite) -> u64 {
    match suite {
        Suite::Lipschitz => 0,
        Suite::Quasiconvex => 1,
        Suite::MonotoneMax => 2,
        Suite::CvarDual => 3,
        Suite::EpisodeGeom => 4,
    }
}

/// Criteria rows that carry a Lipschitz constant, at representative
/// parameters.
fn lipschitz_criteria() -> Vec<RiskCriterion> {
    vec![
        RiskCriterion::cvar(0.05).unwrap(),
        RiskCriterion::cvar(0.5).unwrap(),
        RiskCriterion::cvar(1.0).unwrap(),
        RiskCriterion::mean(),
        RiskCriterion::moment(2).unwrap(),
        RiskCriterion::moment(3).unwrap(),
        RiskCriterion::entropy(0.5).unwrap(),
        RiskCriterion::entropy(1.0).unwrap(),
        RiskCriterion::entropy(2.0).unwrap(),
        RiskCriterion::below_target_semi_variance(0.5).unwrap(),
        RiskCriterion::below_target_semi_variance(0.9).unwrap(),
        RiskCriterion::NegativeVariance,
        RiskCriterion::mean_variance(1.0).unwrap(),
        RiskCriterion::mean_variance(3.0).unwrap(),
        RiskCriterion::sharpe(0.2, 0.01).unwrap(),
        RiskCriterion::sortino(0.2, 0.01).unwrap(),
    ]
}

/// Draws an assortment problem: preferences, a raised copy, profits, and a
/// non-trivial assortment over at most `max_n` products.
pub(crate) fn sample_raised_problem(
    rng: &mut SimRng,
    max_n: usize,
) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<usize>) {
    let n = rng.random_range(1..=max_n);
    let v: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let v_raised: Vec<f64> = v
        .iter()
        .map(|&x| x + rng.random::<f64>() * (1.0 - x))
        .collect();
    let r: Vec<f64> = (0..n).map(|_| 0.1 + 0.9 * rng.random::<f64>()).collect();
    let mut s: Vec<usize> = (1..=n).filter(|_| rng.random::<f64>() < 0.6).collect();
    if s.is_empty() {
        s.push(rng.random_range(1..=n));
    }
    (v, v_raised, r, s)
}

fn lipschitz_suite(rng: &mut SimRng) -> Result<SuiteReport> {
    let criteria = lipschitz_criteria();
    let draws = 2000;
    let mut checks = 0;
    let mut violations = 0;
    let mut details = Vec::new();
    let mut problems = Vec::with_capacity(draws);
    for _ in 0..draws {
        problems.push(sample_raised_problem(rng, 8));
    }
    for criterion in &criteria {
        let constants = criterion.constants();
        let gamma2 = constants.gamma2.expect("all suite criteria have gamma2");
        let mut worst_margin = f64::NEG_INFINITY;
        let mut criterion_violations = 0u64;
        for (v, v_raised, r, s) in &problems {
            let base = criterion.evaluate(&RewardDistribution::from_assortment(s, v, r)?)?;
            let raised =
                criterion.evaluate(&RewardDistribution::from_assortment(s, v_raised, r)?)?;
            let increase: f64 = s.iter().map(|&i| v_raised[i - 1] - v[i - 1]).sum();
            let denom = 1.0 + s.iter().map(|&i| v[i - 1]).sum::<f64>();
            let denom_raised = 1.0 + s.iter().map(|&i| v_raised[i - 1]).sum::<f64>();

            // Boundedness on both endpoints.
            checks += 2;
            if base.abs() > constants.gamma1 + 1e-9 || raised.abs() > constants.gamma1 + 1e-9 {
                violations += 1;
                criterion_violations += 1;
            }
            // One-sided growth bounds with the base and raised denominators.
            checks += 2;
            let diff = raised - base;
            let bound_base = gamma2 / denom * increase;
            let bound_raised = gamma2 / denom_raised * increase;
            worst_margin = worst_margin.max(diff - bound_raised);
            if diff > bound_base + 1e-9 {
                violations += 1;
                criterion_violations += 1;
            }
            if diff > bound_raised + 1e-9 {
                violations += 1;
                criterion_violations += 1;
            }
        }
        details.push(format!(
            "{criterion}: gamma1 {:.6}, gamma2 {gamma2:.6}, {} violations, worst raised-denominator margin {worst_margin:.3e}",
            constants.gamma1, criterion_violations
        ));
    }
    // Total-variation bound on the choice probabilities themselves.
    let mut tv_violations = 0u64;
    for (v, v_raised, r, s) in &problems {
        let _ = r;
        let denom = 1.0 + s.iter().map(|&i| v[i - 1]).sum::<f64>();
        let denom_raised = 1.0 + s.iter().map(|&i| v_raised[i - 1]).sum::<f64>();
        let tv: f64 = s
            .iter()
            .map(|&i| (v_raised[i - 1] / denom_raised - v[i - 1] / denom).abs())
            .sum();
        let increase: f64 = s.iter().map(|&i| v_raised[i - 1] - v[i - 1]).sum();
        checks += 1;
        if tv > 2.0 / denom_raised * increase + 1e-12 {
            violations += 1;
            tv_violations += 1;
        }
    }
    details.push(format!(
        "choice-probability total variation: {tv_violations} violations"
    ));
    Ok(SuiteReport {
        suite: Suite::Lipschitz,
        checks,
        violations,
        details,
    })
}

/// Random discrete distribution with up to six atoms.
pub(crate) fn sample_distribution(rng: &mut SimRng) -> RewardDistribution {
    let atoms = rng.random_range(1..=6usize);
    let payoffs: Vec<f64> = (0..atoms).map(|_| rng.random::<f64>()).collect();
    let weights: Vec<f64> = (0..atoms).map(|_| 0.05 + rng.random::<f64>()).collect();
    let total: f64 = weights.iter().sum();
    RewardDistribution::new(
        payoffs
            .into_iter()
            .zip(weights.into_iter().map(|w| w / total)),
    )
    .expect("sampled atoms form a distribution")
}

fn quasiconvex_suite(rng: &mut SimRng) -> Result<SuiteReport> {
    let mut criteria = lipschitz_criteria();
    criteria.insert(0, RiskCriterion::var(0.5).unwrap());
    criteria.insert(1, RiskCriterion::var(0.05).unwrap());
    let pairs = 1000;
    let mut checks = 0;
    let mut violations = 0;
    let mut details = Vec::new();
    let mut sampled = Vec::with_capacity(pairs);
    for _ in 0..pairs {
        sampled.push((sample_distribution(rng), sample_distribution(rng)));
    }
    for criterion in &criteria {
        let mut criterion_violations = 0u64;
        for (f1, f2) in &sampled {
            let u1 = criterion.evaluate(f1)?;
            let u2 = criterion.evaluate(f2)?;
            let cap = u1.max(u2);
            for step in 0..=10 {
                let lambda = step as f64 / 10.0;
                let mix = RewardDistribution::mixture(lambda, f1, f2)?;
                checks += 1;
                if criterion.evaluate(&mix)? > cap + 1e-9 {
                    violations += 1;
                    criterion_violations += 1;
                }
            }
        }
        details.push(format!("{criterion}: {criterion_violations} violations"));
    }
    Ok(SuiteReport {
        suite: Suite::Quasiconvex,
        checks,
        violations,
        details,
    })
}

fn monotone_max_suite(rng: &mut SimRng) -> Result<SuiteReport> {
    let criteria = [
        RiskCriterion::cvar(0.5).unwrap(),
        RiskCriterion::entropy(1.0).unwrap(),
        RiskCriterion::sharpe(0.2, 0.01).unwrap(),
        RiskCriterion::mean(),
    ];
    let instances = 500;
    let mut checks = 0;
    let mut violations = 0;
    let mut details = Vec::new();
    let mut problems = Vec::with_capacity(instances);
    for _ in 0..instances {
        let n = rng.random_range(1..=6usize);
        let v: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let v_raised: Vec<f64> = v
            .iter()
            .map(|&x| x + rng.random::<f64>() * (1.0 - x))
            .collect();
        let r: Vec<f64> = (0..n).map(|_| 0.1 + 0.9 * rng.random::<f64>()).collect();
        let k = rng.random_range(1..=n.min(3));
        problems.push((v, v_raised, r, k));
    }
    for criterion in &criteria {
        let mut criterion_violations = 0u64;
        for (v, v_raised, r, k) in &problems {
            let base = optimize_exact(v, r, *k, criterion)?;
            let raised = optimize_exact(v_raised, r, *k, criterion)?;
            checks += 1;
            if raised.value < base.value - 1e-9 {
                violations += 1;
                criterion_violations += 1;
            }
        }
        details.push(format!("{criterion}: {criterion_violations} violations"));
    }
    Ok(SuiteReport {
        suite: Suite::MonotoneMax,
        checks,
        violations,
        details,
    })
}

/// Integral form of conditional value-at-risk, exact for step CDFs:
/// `(1/alpha) (alpha - ∫_0^1 F(x) ∧ alpha dx)` summed piecewise between
/// consecutive atoms.
pub fn cvar_by_integral(f: &RewardDistribution, alpha: f64) -> f64 {
    let atoms = f.atoms();
    let mut integral = 0.0;
    let mut cum = 0.0;
    for (k, atom) in atoms.iter().enumerate() {
        cum += atom.mass;
        let right = atoms.get(k + 1).map_or(1.0, |next| next.payoff);
        integral += cum.min(alpha) * (right - atom.payoff);
    }
    (alpha - integral) / alpha
}

fn cvar_dual_suite(rng: &mut SimRng) -> Result<SuiteReport> {
    let draws = 1000;
    let mut checks = 0;
    let mut violations = 0;
    let mut worst = 0.0f64;
    for _ in 0..draws {
        let f = sample_distribution(rng);
        let alpha = 0.01 + 0.99 * rng.random::<f64>();
        let closed = RiskCriterion::cvar(alpha)?.evaluate(&f)?;
        let integral = cvar_by_integral(&f, alpha);
        checks += 1;
        let gap = (closed - integral).abs();
        worst = worst.max(gap);
        if gap > 1e-9 {
            violations += 1;
        }
    }
    Ok(SuiteReport {
        suite: Suite::CvarDual,
        checks,
        violations,
        details: vec![format!("worst absolute gap {worst:.3e}")],
    })
}

/// Chi-square goodness-of-fit statistic of observed episode lengths against
/// the geometric law with success probability `p`, merging the tail so every
/// cell keeps an expected count of at least ten. Returns the statistic and
/// the 0.999 quantile of the matching chi-square distribution.
fn geometric_chi_square(lengths: &[usize], p: f64) -> (f64, f64) {
    let n = lengths.len() as f64;
    let q = 1.0 - p;
    // Cells 1..=m individually, one tail cell for lengths > m.
    let mut m = 1usize;
    while n * q.powi(m as i32 - 1) * p >= 10.0 && m < 10_000 {
        m += 1;
    }
    let m = m.max(2) - 1;
    let mut observed = vec![0u64; m + 1];
    for &len in lengths {
        let cell = (len - 1).min(m);
        observed[cell] += 1;
    }
    let mut statistic = 0.0;
    for (cell, &obs) in observed.iter().enumerate() {
        let expected = if cell < m {
            n * q.powi(cell as i32) * p
        } else {
            n * q.powi(m as i32)
        };
        let diff = obs as f64 - expected;
        statistic += diff * diff / expected;
    }
    let dof = m as f64; // cells - 1
    let threshold = ChiSquared::new(dof)
        .expect("positive degrees of freedom")
        .inverse_cdf(0.999);
    (statistic, threshold)
}

fn episode_geom_suite(rng: &mut SimRng) -> Result<SuiteReport> {
    let instance = Instance::new(
        vec![0.7, 0.3, 0.5, 0.15, 0.95],
        vec![0.9, 0.4, 0.6, 0.2, 0.8],
        5,
    )?;
    let assortments: [&[usize]; 3] = [&[1, 2], &[3], &[1, 2, 3, 4, 5]];
    let episodes = 100_000;
    let mut checks = 0;
    let mut violations = 0;
    let mut details = Vec::new();
    for s in assortments {
        let sum_v: f64 = s.iter().map(|&i| instance.preferences()[i - 1]).sum();
        let expected_mean = 1.0 + sum_v;
        let mut lengths = Vec::with_capacity(episodes);
        for _ in 0..episodes {
            lengths.push(run_episode(s, &instance, rng, usize::MAX >> 1)?.length);
        }
        let mean = lengths.iter().sum::<usize>() as f64 / episodes as f64;
        let (statistic, threshold) = geometric_chi_square(&lengths, 1.0 / expected_mean);
        checks += 2;
        let mean_ok = (mean - expected_mean).abs() / expected_mean <= 0.02;
        let fit_ok = statistic <= threshold;
        if !mean_ok {
            violations += 1;
        }
        if !fit_ok {
            violations += 1;
        }
        details.push(format!(
            "assortment {s:?}: mean length {mean:.4} vs {expected_mean:.4}, chi-square {statistic:.2} vs threshold {threshold:.2}"
        ));
    }
    Ok(SuiteReport {
        suite: Suite::EpisodeGeom,
        checks,
        violations,
        details,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for suite in [
            Suite::Lipschitz,
            Suite::Quasiconvex,
            Suite::MonotoneMax,
            Suite::CvarDual,
            Suite::EpisodeGeom,
        ] {
            let parsed: Suite = suite.to_string().parse().unwrap();
            assert_eq!(parsed, suite);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn cvar_dual_suite_passes() {
        let report = run_suite(Suite::CvarDual, DEFAULT_VERIFY_SEED).unwrap();
        assert!(report.passed(), "{report}");
        assert_eq!(report.checks, 1000);
    }

    #[test]
    fn monotone_max_suite_passes() {
        let report = run_suite(Suite::MonotoneMax, DEFAULT_VERIFY_SEED).unwrap();
        assert!(report.passed(), "{report}");
        assert_eq!(report.checks, 2000);
    }

    #[test]
    fn chi_square_rejects_a_wrong_parameter() {
        let mut rng = derive_rng(1, &[PURPOSE_VERIFY, 99]);
        let p = 0.4;
        let lengths: Vec<usize> = (0..50_000)
            .map(|_| {
                let mut len = 1;
                while rng.random::<f64>() > p {
                    len += 1;
                }
                len
            })
            .collect();
        let (stat_good, thr) = geometric_chi_square(&lengths, p);
        assert!(stat_good <= thr, "stat {stat_good} threshold {thr}");
        let (stat_bad, thr_bad) = geometric_chi_square(&lengths, 0.5);
        assert!(stat_bad > thr_bad, "stat {stat_bad} threshold {thr_bad}");
    }
}
