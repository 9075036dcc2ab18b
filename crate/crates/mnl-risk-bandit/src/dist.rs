//! Finite discrete reward distributions on `[0, 1]`.
//!
//! [`RewardDistribution`] is the object every risk criterion consumes: a
//! sorted list of `(payoff, mass)` atoms with masses summing to one. The main
//! constructor [`RewardDistribution::from_assortment`] builds the profit
//! distribution induced by serving an assortment under the multinomial logit
//! choice model: the no-purchase outcome pays 0 with probability
//! `1/(1 + Σ v_i)` and product `i` pays `r_i` with probability
//! `v_i/(1 + Σ v_i)`. Products with equal profits are merged into a single
//! atom at construction time.

use crate::error::{Error, Result};

/// Tolerance for the total-mass invariant.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// A single point of probability mass.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    /// Outcome value in `[0, 1]`.
    pub payoff: f64,
    /// Probability of the outcome, non-negative.
    pub mass: f64,
}

/// A finite discrete probability distribution on `[0, 1]`.
///
/// Atoms are sorted strictly ascending by payoff, atoms sharing a payoff are
/// merged, zero-mass atoms are dropped, and the total mass is one within
/// [`MASS_TOLERANCE`]. Values are immutable after construction, so
/// distributions can be shared freely across threads.
#[derive(Clone, Debug, PartialEq)]
pub struct RewardDistribution {
    atoms: Vec<Atom>,
}

impl RewardDistribution {
    /// Builds a distribution from `(payoff, mass)` pairs in any order.
    ///
    /// Pairs with exactly equal payoffs are merged by summing their masses;
    /// zero-mass pairs are dropped. Returns an error if any payoff lies
    /// outside `[0, 1]`, any mass is negative or non-finite, no mass remains,
    /// or the total mass differs from one by more than [`MASS_TOLERANCE`].
    pub fn new(pairs: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut atoms: Vec<Atom> = Vec::new();
        for (payoff, mass) in pairs {
            if !payoff.is_finite() || !(0.0..=1.0).contains(&payoff) {
                return Err(Error::InvalidDistribution(format!(
                    "payoff {payoff} outside [0, 1]"
                )));
            }
            if !mass.is_finite() || mass < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "mass {mass} is negative or not finite"
                )));
            }
            atoms.push(Atom { payoff, mass });
        }
        Self::from_atoms(atoms)
    }

    /// Merges, sorts and validates a pre-screened atom list.
    fn from_atoms(mut atoms: Vec<Atom>) -> Result<Self> {
        atoms.sort_by(|a, b| a.payoff.total_cmp(&b.payoff));
        let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
        for atom in atoms {
            match merged.last_mut() {
                // Merging keys on exact payoff equality: payoffs are inputs,
                // not computed values, so no epsilon is applied.
                Some(last) if last.payoff == atom.payoff => last.mass += atom.mass,
                _ => merged.push(atom),
            }
        }
        merged.retain(|a| a.mass > 0.0);
        let total: f64 = merged.iter().map(|a| a.mass).sum();
        if merged.is_empty() || (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "masses sum to {total}, expected 1 within {MASS_TOLERANCE:e}"
            )));
        }
        Ok(Self { atoms: merged })
    }

    /// The distribution that pays `payoff` with certainty.
    pub fn point_mass(payoff: f64) -> Result<Self> {
        Self::new([(payoff, 1.0)])
    }

    /// Profit distribution of serving assortment `s` under the MNL model.
    ///
    /// `s` holds distinct product ids in `1..=N`, `preferences[i-1]` is the
    /// attraction weight of product `i` in `[0, 1]`, and `profits[i-1]` its
    /// profit in `(0, 1]`.
    pub fn from_assortment(s: &[usize], preferences: &[f64], profits: &[f64]) -> Result<Self> {
        let n = preferences.len();
        if profits.len() != n {
            return Err(Error::InvalidInput(format!(
                "preference vector has length {n} but profit vector has length {}",
                profits.len()
            )));
        }
        validate_assortment(s, n)?;
        validate_preference_vector(preferences)?;
        validate_profit_vector(profits)?;
        let denom = 1.0 + s.iter().map(|&i| preferences[i - 1]).sum::<f64>();
        let mut atoms = Vec::with_capacity(s.len() + 1);
        atoms.push(Atom {
            payoff: 0.0,
            mass: 1.0 / denom,
        });
        for &i in s {
            atoms.push(Atom {
                payoff: profits[i - 1],
                mass: preferences[i - 1] / denom,
            });
        }
        Self::from_atoms(atoms)
    }

    /// Empirical distribution of a sample of values in `[0, 1]`.
    ///
    /// Each distinct value becomes an atom with mass `count / len`.
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidInput("empty sample sequence".into()));
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(|a, b| a.total_cmp(b));
        let total = samples.len() as f64;
        let mut atoms = Vec::new();
        let mut idx = 0;
        while idx < sorted.len() {
            let payoff = sorted[idx];
            let mut count = 0usize;
            while idx < sorted.len() && sorted[idx] == payoff {
                count += 1;
                idx += 1;
            }
            atoms.push(Atom {
                payoff,
                mass: count as f64 / total,
            });
        }
        for a in &atoms {
            if !a.payoff.is_finite() || !(0.0..=1.0).contains(&a.payoff) {
                return Err(Error::InvalidInput(format!(
                    "sample {} outside [0, 1]",
                    a.payoff
                )));
            }
        }
        Self::from_atoms(atoms)
    }

    /// Convex combination `lambda * f1 + (1 - lambda) * f2` of two
    /// distributions, with masses merged on shared payoffs.
    pub fn mixture(lambda: f64, f1: &Self, f2: &Self) -> Result<Self> {
        if !lambda.is_finite() || !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidParameter(format!(
                "mixture weight {lambda} outside [0, 1]"
            )));
        }
        let mut atoms = Vec::with_capacity(f1.atoms.len() + f2.atoms.len());
        for a in &f1.atoms {
            atoms.push(Atom {
                payoff: a.payoff,
                mass: lambda * a.mass,
            });
        }
        for a in &f2.atoms {
            atoms.push(Atom {
                payoff: a.payoff,
                mass: (1.0 - lambda) * a.mass,
            });
        }
        Self::from_atoms(atoms)
    }

    /// Atoms sorted strictly ascending by payoff.
    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Expected value.
    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|a| a.payoff * a.mass).sum()
    }

    /// `n`-th moment about zero, `n >= 1`.
    pub fn moment(&self, n: u32) -> Result<f64> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "moment order must be at least 1".into(),
            ));
        }
        Ok(self
            .atoms
            .iter()
            .map(|a| a.payoff.powi(n as i32) * a.mass)
            .sum())
    }

    /// Variance, clamped into `[0, 1/4]`.
    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        let second: f64 = self.atoms.iter().map(|a| a.payoff * a.payoff * a.mass).sum();
        (second - mean * mean).clamp(0.0, 0.25)
    }

    /// Right-continuous cumulative distribution function evaluated at `x`:
    /// total mass of atoms with payoff `<= x`.
    pub fn cdf_at(&self, x: f64) -> f64 {
        self.atoms
            .iter()
            .take_while(|a| a.payoff <= x)
            .map(|a| a.mass)
            .sum()
    }
}

/// Checks every preference weight lies in `[0, 1]`.
pub(crate) fn validate_preference_vector(preferences: &[f64]) -> Result<()> {
    for (i, &v) in preferences.iter().enumerate() {
        if !v.is_finite() || !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidInput(format!(
                "preference v_{} = {v} outside [0, 1]",
                i + 1
            )));
        }
    }
    Ok(())
}

/// Checks every profit lies in `(0, 1]`.
pub(crate) fn validate_profit_vector(profits: &[f64]) -> Result<()> {
    for (i, &r) in profits.iter().enumerate() {
        if !r.is_finite() || r <= 0.0 || r > 1.0 {
            return Err(Error::InvalidInput(format!(
                "profit r_{} = {r} outside (0, 1]",
                i + 1
            )));
        }
    }
    Ok(())
}

/// Checks that `s` holds distinct product ids in `1..=n`.
pub(crate) fn validate_assortment(s: &[usize], n: usize) -> Result<()> {
    for &i in s {
        if i == 0 || i > n {
            return Err(Error::InvalidAssortment(format!(
                "product id {i} outside 1..={n}"
            )));
        }
    }
    for (k, &i) in s.iter().enumerate() {
        if s[..k].contains(&i) {
            return Err(Error::InvalidAssortment(format!("duplicate product id {i}")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn atoms_of(d: &RewardDistribution) -> Vec<(f64, f64)> {
        d.atoms().iter().map(|a| (a.payoff, a.mass)).collect()
    }

    #[test]
    fn empty_assortment_is_certain_no_purchase() {
        let d = RewardDistribution::from_assortment(&[], &[0.3, 0.7], &[0.5, 0.9]).unwrap();
        assert_eq!(atoms_of(&d), vec![(0.0, 1.0)]);
    }

    #[test]
    fn two_product_assortment_matches_choice_model() {
        let d = RewardDistribution::from_assortment(&[1, 2], &[0.5, 0.5], &[0.3, 0.9]).unwrap();
        assert_eq!(atoms_of(&d), vec![(0.0, 0.5), (0.3, 0.25), (0.9, 0.25)]);
    }

    #[test]
    fn unit_preference_splits_evenly() {
        let d = RewardDistribution::from_assortment(&[1], &[1.0], &[1.0]).unwrap();
        assert_eq!(atoms_of(&d), vec![(0.0, 0.5), (1.0, 0.5)]);
    }

    #[test]
    fn equal_profits_are_merged() {
        let d =
            RewardDistribution::from_assortment(&[1, 2, 3], &[0.2, 0.3, 0.5], &[0.4, 0.4, 0.8])
                .unwrap();
        let denom = 2.0;
        assert_eq!(d.atoms().len(), 3);
        assert!((d.atoms()[1].payoff - 0.4).abs() == 0.0);
        assert!((d.atoms()[1].mass - 0.5 / denom).abs() < 1e-15);
    }

    #[test]
    fn out_of_range_id_is_rejected() {
        let err = RewardDistribution::from_assortment(&[3], &[0.5, 0.5], &[0.3, 0.9]).unwrap_err();
        assert!(matches!(err, Error::InvalidAssortment(_)));
        let err =
            RewardDistribution::from_assortment(&[1, 1], &[0.5, 0.5], &[0.3, 0.9]).unwrap_err();
        assert!(matches!(err, Error::InvalidAssortment(_)));
    }

    #[test]
    fn mean_examples() {
        let d = RewardDistribution::new([(0.0, 1.0)]).unwrap();
        assert_eq!(d.mean(), 0.0);
        let d = RewardDistribution::new([(0.0, 0.5), (0.3, 0.25), (0.9, 0.25)]).unwrap();
        assert!((d.mean() - 0.3).abs() < 1e-15);
        let d = RewardDistribution::new([(0.0, 0.5), (1.0, 0.5)]).unwrap();
        assert_eq!(d.mean(), 0.5);
    }

    #[test]
    fn moment_examples() {
        let half = RewardDistribution::new([(0.0, 0.5), (1.0, 0.5)]).unwrap();
        assert_eq!(half.moment(1).unwrap(), 0.5);
        assert_eq!(half.moment(2).unwrap(), 0.5);
        let point = RewardDistribution::point_mass(0.5).unwrap();
        assert!((point.moment(3).unwrap() - 0.125).abs() < 1e-15);
        assert!(matches!(
            half.moment(0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn variance_examples() {
        assert_eq!(RewardDistribution::point_mass(0.7).unwrap().variance(), 0.0);
        let half = RewardDistribution::new([(0.0, 0.5), (1.0, 0.5)]).unwrap();
        assert_eq!(half.variance(), 0.25);
        let d = RewardDistribution::new([(0.0, 0.5), (0.4, 0.3), (1.0, 0.2)]).unwrap();
        assert!((d.variance() - 0.1456).abs() < 1e-15);
    }

    #[test]
    fn cdf_examples() {
        let d = RewardDistribution::new([(0.0, 0.5), (0.4, 0.5)]).unwrap();
        assert_eq!(d.cdf_at(1.0), 1.0);
        assert_eq!(d.cdf_at(0.2), 0.5);
        assert_eq!(d.cdf_at(0.4), 1.0);
    }

    #[test]
    fn mixture_endpoints_are_exact() {
        let f1 = RewardDistribution::new([(0.1, 0.25), (0.6, 0.75)]).unwrap();
        let f2 = RewardDistribution::new([(0.0, 1.0)]).unwrap();
        assert_eq!(RewardDistribution::mixture(1.0, &f1, &f2).unwrap(), f1);
        assert_eq!(RewardDistribution::mixture(0.0, &f1, &f2).unwrap(), f2);
        let even = RewardDistribution::mixture(
            0.5,
            &RewardDistribution::point_mass(0.0).unwrap(),
            &RewardDistribution::point_mass(1.0).unwrap(),
        )
        .unwrap();
        assert_eq!(atoms_of(&even), vec![(0.0, 0.5), (1.0, 0.5)]);
    }

    #[test]
    fn mass_drift_beyond_tolerance_is_rejected() {
        let err = RewardDistribution::new([(0.0, 0.5), (1.0, 0.5 - 1e-9)]).unwrap_err();
        assert!(matches!(err, Error::InvalidDistribution(_)));
        // Drift within tolerance is accepted as-is.
        RewardDistribution::new([(0.0, 0.5), (1.0, 0.5 - 1e-13)]).unwrap();
    }

    #[test]
    fn empirical_distribution_groups_samples() {
        let d = RewardDistribution::from_samples(&[0.5; 1000]).unwrap();
        assert_eq!(atoms_of(&d), vec![(0.5, 1.0)]);
        let d = RewardDistribution::from_samples(&[0.0, 0.0, 1.0, 1.0]).unwrap();
        assert_eq!(atoms_of(&d), vec![(0.0, 0.5), (1.0, 0.5)]);
        assert!(RewardDistribution::from_samples(&[]).is_err());
    }

    proptest! {
        // Masses from the choice model sum to one within tolerance.
        #[test]
        fn assortment_masses_sum_to_one(
            v in proptest::collection::vec(0.0..=1.0f64, 1..8),
            mask in 0usize..256,
        ) {
            let n = v.len();
            let r: Vec<f64> = (0..n).map(|i| 0.1 + 0.9 * ((i as f64 + 0.5) / n as f64)).collect();
            let s: Vec<usize> = (1..=n).filter(|i| mask & (1 << (i - 1)) != 0).collect();
            let d = RewardDistribution::from_assortment(&s, &v, &r).unwrap();
            let total: f64 = d.atoms().iter().map(|a| a.mass).sum();
            prop_assert!((total - 1.0).abs() <= MASS_TOLERANCE);
        }

        // Merging equal payoffs preserves mean, moments, and the CDF.
        #[test]
        fn merging_preserves_functionals(
            payoff in 0.01..=1.0f64,
            split in 0.1..=0.9f64,
            other in 0.0..=1.0f64,
        ) {
            prop_assume!(other != payoff);
            let merged = RewardDistribution::new([(payoff, 0.6), (other, 0.4)]).unwrap();
            let unmerged = RewardDistribution::new([
                (payoff, 0.6 * split),
                (payoff, 0.6 * (1.0 - split)),
                (other, 0.4),
            ]).unwrap();
            prop_assert!((merged.mean() - unmerged.mean()).abs() < 1e-12);
            prop_assert!((merged.moment(3).unwrap() - unmerged.moment(3).unwrap()).abs() < 1e-12);
            for x in [0.0, payoff, other, 0.5, 1.0] {
                prop_assert!((merged.cdf_at(x) - unmerged.cdf_at(x)).abs() < 1e-12);
            }
        }

        // Mixing a distribution with itself is the identity.
        #[test]
        fn self_mixture_is_identity(lambda in 0.0..=1.0f64) {
            let f = RewardDistribution::new([(0.0, 0.5), (0.3, 0.25), (0.9, 0.25)]).unwrap();
            let m = RewardDistribution::mixture(lambda, &f, &f).unwrap();
            prop_assert_eq!(m.atoms().len(), f.atoms().len());
            for (a, b) in m.atoms().iter().zip(f.atoms()) {
                prop_assert_eq!(a.payoff, b.payoff);
                prop_assert!((a.mass - b.mass).abs() < 1e-12);
            }
        }

        // Raising preferences moves per-product masses by at most
        // 2 / (1 + sum v') times the total preference increase.
        #[test]
        fn total_variation_bound_under_raised_preferences(
            v in proptest::collection::vec(0.0..=1.0f64, 1..8),
            bumps in proptest::collection::vec(0.0..=1.0f64, 8),
            mask in 0usize..256,
        ) {
            let n = v.len();
            let vprime: Vec<f64> = v
                .iter()
                .zip(&bumps)
                .map(|(&vi, &b)| vi + b * (1.0 - vi))
                .collect();
            let s: Vec<usize> = (1..=n).filter(|i| mask & (1 << (i - 1)) != 0).collect();
            let denom = 1.0 + s.iter().map(|&i| v[i - 1]).sum::<f64>();
            let denom_prime = 1.0 + s.iter().map(|&i| vprime[i - 1]).sum::<f64>();
            let tv: f64 = s
                .iter()
                .map(|&i| (vprime[i - 1] / denom_prime - v[i - 1] / denom).abs())
                .sum();
            let increase: f64 = s.iter().map(|&i| vprime[i - 1] - v[i - 1]).sum();
            prop_assert!(tv <= 2.0 / denom_prime * increase + 1e-12);
        }
    }
}
