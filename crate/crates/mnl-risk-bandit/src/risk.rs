//! Risk criteria over reward distributions.
//!
//! A [`RiskCriterion`] maps a [`RewardDistribution`] to a real score to be
//! maximized. The supported family covers value-at-risk, conditional
//! value-at-risk, moments about zero, entropy risk, negative below-target
//! semi-variance, negative variance, mean-variance, and the Sharpe and
//! Sortino ratios. Each criterion carries a boundedness constant `gamma1`
//! (`|U(F)| <= gamma1` for every distribution on `[0, 1]`) and, except for
//! value-at-risk, a one-sided Lipschitz constant `gamma2` controlling how much
//! the score can grow when preference parameters are raised:
//!
//! ```text
//! U(F(S, v')) - U(F(S, v)) <= gamma2 / (1 + Σ_{i∈S} v_i) · Σ_{i∈S} (v'_i - v_i)
//! ```
//!
//! for all `v' >= v`. The same constants also satisfy the stronger form with
//! `1 + Σ v'_i` in the denominator. All logarithms are natural.
//!
//! Conditional value-at-risk is evaluated in closed form over the sorted
//! atoms: the average payoff of the lowest `alpha` fraction of probability
//! mass, splitting the boundary atom fractionally. The equivalent definition
//! `(1/alpha) (alpha - ∫ F(x) ∧ alpha dx)` is kept as an independent check in
//! the test and verification suites, not on the evaluation path.
//!
//! # Textual encoding
//!
//! Criteria parse from and print to a compact text form used by the CLI and
//! config files: `var:0.5`, `cvar:0.05`, `mean`, `moment:2`, `entropy:1.0`,
//! `btsv:0.5`, `negvar`, `meanvar:1.0`, `sharpe:0.2,0.01`, `sortino:0.2,0.01`.
//! `mean` is the first moment.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dist::RewardDistribution;
use crate::error::{Error, Result};

/// A risk criterion with validated parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum RiskCriterion {
    /// Value-at-risk at level `alpha` in `(0, 1]`: `inf { x : F(x) >= alpha }`.
    ValueAtRisk { alpha: f64 },
    /// Conditional value-at-risk at level `alpha` in `(0, 1]`: the mean of
    /// the worst `alpha` fraction of outcomes.
    Cvar { alpha: f64 },
    /// `n`-th moment about zero, `n >= 1`; `n = 1` is the mean.
    NthMoment { n: u32 },
    /// Entropy risk with aversion `theta > 0`:
    /// `-(1/theta) ln E[exp(-theta X)]`, taken over the full outcome
    /// distribution including the no-purchase atom at payoff zero.
    EntropyRisk { theta: f64 },
    /// Negative below-target semi-variance with target in `[0, 1]`:
    /// `-E[(X - target)^2 ; X <= target]`.
    BelowTargetSemiVariance { target: f64 },
    /// Negative variance.
    NegativeVariance,
    /// Mean minus `weight` times variance, `weight > 0`.
    MeanVariance { weight: f64 },
    /// Sharpe ratio `(mean - target) / sqrt(epsilon + variance)` with target
    /// in `[0, 1]` and regularizer `epsilon > 0`.
    Sharpe { target: f64, epsilon: f64 },
    /// Sortino ratio `(mean - target) / sqrt(epsilon + semi-variance)` with
    /// target in `[0, 1]` and regularizer `epsilon > 0`.
    Sortino { target: f64, epsilon: f64 },
}

/// Boundedness and one-sided Lipschitz constants of a criterion.
///
/// `gamma2` is absent for value-at-risk, which is discontinuous in the
/// preference parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriterionConstants {
    pub gamma1: f64,
    pub gamma2: Option<f64>,
}

impl RiskCriterion {
    /// The mean criterion, i.e. the first moment.
    pub fn mean() -> Self {
        RiskCriterion::NthMoment { n: 1 }
    }

    pub fn var(alpha: f64) -> Result<Self> {
        let c = RiskCriterion::ValueAtRisk { alpha };
        c.validate()?;
        Ok(c)
    }

    pub fn cvar(alpha: f64) -> Result<Self> {
        let c = RiskCriterion::Cvar { alpha };
        c.validate()?;
        Ok(c)
    }

    pub fn moment(n: u32) -> Result<Self> {
        let c = RiskCriterion::NthMoment { n };
        c.validate()?;
        Ok(c)
    }

    pub fn entropy(theta: f64) -> Result<Self> {
        let c = RiskCriterion::EntropyRisk { theta };
        c.validate()?;
        Ok(c)
    }

    pub fn below_target_semi_variance(target: f64) -> Result<Self> {
        let c = RiskCriterion::BelowTargetSemiVariance { target };
        c.validate()?;
        Ok(c)
    }

    pub fn mean_variance(weight: f64) -> Result<Self> {
        let c = RiskCriterion::MeanVariance { weight };
        c.validate()?;
        Ok(c)
    }

    pub fn sharpe(target: f64, epsilon: f64) -> Result<Self> {
        let c = RiskCriterion::Sharpe { target, epsilon };
        c.validate()?;
        Ok(c)
    }

    pub fn sortino(target: f64, epsilon: f64) -> Result<Self> {
        let c = RiskCriterion::Sortino { target, epsilon };
        c.validate()?;
        Ok(c)
    }

    /// Checks the parameter ranges.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidParameter(msg));
        match *self {
            RiskCriterion::ValueAtRisk { alpha } | RiskCriterion::Cvar { alpha } => {
                if !alpha.is_finite() || alpha <= 0.0 || alpha > 1.0 {
                    return fail(format!("alpha {alpha} outside (0, 1]"));
                }
            }
            RiskCriterion::NthMoment { n } => {
                if n == 0 {
                    return fail("moment order must be at least 1".into());
                }
            }
            RiskCriterion::EntropyRisk { theta } => {
                if !theta.is_finite() || theta <= 0.0 {
                    return fail(format!("theta {theta} must be positive"));
                }
            }
            RiskCriterion::BelowTargetSemiVariance { target } => {
                if !target.is_finite() || !(0.0..=1.0).contains(&target) {
                    return fail(format!("target {target} outside [0, 1]"));
                }
            }
            RiskCriterion::NegativeVariance => {}
            RiskCriterion::MeanVariance { weight } => {
                if !weight.is_finite() || weight <= 0.0 {
                    return fail(format!("weight {weight} must be positive"));
                }
            }
            RiskCriterion::Sharpe { target, epsilon }
            | RiskCriterion::Sortino { target, epsilon } => {
                if !target.is_finite() || !(0.0..=1.0).contains(&target) {
                    return fail(format!("target {target} outside [0, 1]"));
                }
                if !epsilon.is_finite() || epsilon <= 0.0 {
                    return fail(format!("epsilon {epsilon} must be positive"));
                }
            }
        }
        Ok(())
    }

    /// Evaluates the criterion on a distribution.
    pub fn evaluate(&self, f: &RewardDistribution) -> Result<f64> {
        self.validate()?;
        let atoms: Vec<(f64, f64)> = f.atoms().iter().map(|a| (a.payoff, a.mass)).collect();
        Ok(evaluate_atoms(self, &atoms))
    }

    /// Evaluates the criterion on the empirical distribution of `samples`.
    pub fn empirical_evaluate(&self, samples: &[f64]) -> Result<f64> {
        self.evaluate(&RewardDistribution::from_samples(samples)?)
    }

    /// Boundedness and Lipschitz constants for this criterion.
    ///
    /// Expects validated parameters.
    pub fn constants(&self) -> CriterionConstants {
        match *self {
            RiskCriterion::ValueAtRisk { .. } => CriterionConstants {
                gamma1: 1.0,
                gamma2: None,
            },
            RiskCriterion::Cvar { alpha } => CriterionConstants {
                gamma1: 1.0,
                gamma2: Some(3.0 / alpha),
            },
            RiskCriterion::NthMoment { .. } => CriterionConstants {
                gamma1: 1.0,
                gamma2: Some(1.0),
            },
            RiskCriterion::EntropyRisk { theta } => CriterionConstants {
                gamma1: 1.0,
                gamma2: Some(2.0 * theta.exp() / theta),
            },
            RiskCriterion::BelowTargetSemiVariance { target } => CriterionConstants {
                gamma1: target * target,
                gamma2: Some(2.0 * target * target),
            },
            RiskCriterion::NegativeVariance => CriterionConstants {
                gamma1: 0.25,
                gamma2: Some(6.0),
            },
            RiskCriterion::MeanVariance { weight } => CriterionConstants {
                gamma1: 1.0 + weight / 4.0,
                gamma2: Some(2.0 + 6.0 * weight),
            },
            RiskCriterion::Sharpe { epsilon, .. } => CriterionConstants {
                gamma1: epsilon.sqrt().recip(),
                gamma2: Some(2.0 / epsilon.sqrt() + 3.0 / epsilon.powf(1.5)),
            },
            RiskCriterion::Sortino { epsilon, .. } => CriterionConstants {
                gamma1: epsilon.sqrt().recip(),
                gamma2: Some(2.0 / epsilon.sqrt() + 1.0 / epsilon.powf(1.5)),
            },
        }
    }
}

/// Core evaluation over atoms sorted ascending by payoff with masses summing
/// to one. This is the allocation-free path shared with the optimizers.
pub(crate) fn evaluate_atoms(criterion: &RiskCriterion, atoms: &[(f64, f64)]) -> f64 {
    match *criterion {
        RiskCriterion::ValueAtRisk { alpha } => {
            let mut cum = 0.0;
            for &(x, m) in atoms {
                cum += m;
                if cum >= alpha {
                    return x;
                }
            }
            atoms.last().map_or(0.0, |&(x, _)| x)
        }
        RiskCriterion::Cvar { alpha } => {
            let mut remaining = alpha;
            let mut acc = 0.0;
            for &(x, m) in atoms {
                let take = m.min(remaining);
                acc += x * take;
                remaining -= take;
                if remaining <= 0.0 {
                    break;
                }
            }
            acc / alpha
        }
        RiskCriterion::NthMoment { n } => atoms
            .iter()
            .map(|&(x, m)| x.powi(n as i32) * m)
            .sum::<f64>(),
        RiskCriterion::EntropyRisk { theta } => {
            let exponential_moment: f64 = atoms.iter().map(|&(x, m)| (-theta * x).exp() * m).sum();
            -exponential_moment.ln() / theta
        }
        RiskCriterion::BelowTargetSemiVariance { target } => {
            -semi_variance_below(atoms, target)
        }
        RiskCriterion::NegativeVariance => -variance(atoms),
        RiskCriterion::MeanVariance { weight } => mean(atoms) - weight * variance(atoms),
        RiskCriterion::Sharpe { target, epsilon } => {
            (mean(atoms) - target) / (epsilon + variance(atoms)).sqrt()
        }
        RiskCriterion::Sortino { target, epsilon } => {
            (mean(atoms) - target) / (epsilon + semi_variance_below(atoms, target)).sqrt()
        }
    }
}

fn mean(atoms: &[(f64, f64)]) -> f64 {
    atoms.iter().map(|&(x, m)| x * m).sum()
}

fn variance(atoms: &[(f64, f64)]) -> f64 {
    let mean = mean(atoms);
    let second: f64 = atoms.iter().map(|&(x, m)| x * x * m).sum();
    (second - mean * mean).clamp(0.0, 0.25)
}

fn semi_variance_below(atoms: &[(f64, f64)], target: f64) -> f64 {
    atoms
        .iter()
        .take_while(|&&(x, _)| x <= target)
        .map(|&(x, m)| (x - target) * (x - target) * m)
        .sum()
}

impl fmt::Display for RiskCriterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            RiskCriterion::ValueAtRisk { alpha } => write!(f, "var:{alpha}"),
            RiskCriterion::Cvar { alpha } => write!(f, "cvar:{alpha}"),
            RiskCriterion::NthMoment { n: 1 } => write!(f, "mean"),
            RiskCriterion::NthMoment { n } => write!(f, "moment:{n}"),
            RiskCriterion::EntropyRisk { theta } => write!(f, "entropy:{theta}"),
            RiskCriterion::BelowTargetSemiVariance { target } => write!(f, "btsv:{target}"),
            RiskCriterion::NegativeVariance => write!(f, "negvar"),
            RiskCriterion::MeanVariance { weight } => write!(f, "meanvar:{weight}"),
            RiskCriterion::Sharpe { target, epsilon } => write!(f, "sharpe:{target},{epsilon}"),
            RiskCriterion::Sortino { target, epsilon } => write!(f, "sortino:{target},{epsilon}"),
        }
    }
}

impl FromStr for RiskCriterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, args) = match s.split_once(':') {
            Some((head, args)) => (head, Some(args)),
            None => (s, None),
        };
        let one = |args: Option<&str>| -> Result<f64> {
            args.ok_or_else(|| Error::Parse(format!("criterion `{s}` is missing a parameter")))?
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("criterion `{s}`: {e}")))
        };
        let two = |args: Option<&str>| -> Result<(f64, f64)> {
            let args = args
                .ok_or_else(|| Error::Parse(format!("criterion `{s}` is missing parameters")))?;
            let (a, b) = args
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("criterion `{s}` needs two parameters")))?;
            Ok((
                a.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("criterion `{s}`: {e}")))?,
                b.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("criterion `{s}`: {e}")))?,
            ))
        };
        let criterion = match head {
            "mean" => RiskCriterion::mean(),
            "var" => RiskCriterion::ValueAtRisk { alpha: one(args)? },
            "cvar" => RiskCriterion::Cvar { alpha: one(args)? },
            "moment" => RiskCriterion::NthMoment {
                n: args
                    .ok_or_else(|| Error::Parse(format!("criterion `{s}` is missing an order")))?
                    .parse::<u32>()
                    .map_err(|e| Error::Parse(format!("criterion `{s}`: {e}")))?,
            },
            "entropy" => RiskCriterion::EntropyRisk { theta: one(args)? },
            "btsv" => RiskCriterion::BelowTargetSemiVariance { target: one(args)? },
            "negvar" => RiskCriterion::NegativeVariance,
            "meanvar" => RiskCriterion::MeanVariance { weight: one(args)? },
            "sharpe" => {
                let (target, epsilon) = two(args)?;
                RiskCriterion::Sharpe { target, epsilon }
            }
            "sortino" => {
                let (target, epsilon) = two(args)?;
                RiskCriterion::Sortino { target, epsilon }
            }
            other => return Err(Error::Parse(format!("unknown criterion `{other}`"))),
        };
        criterion.validate()?;
        Ok(criterion)
    }
}

impl Serialize for RiskCriterion {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RiskCriterion {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
