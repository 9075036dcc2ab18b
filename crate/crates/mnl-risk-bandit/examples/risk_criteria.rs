//! Evaluate the whole criterion family on a few reward distributions.
//!
//! ```bash
//! cargo run --release --example risk_criteria
//! ```

use mnl_risk_bandit::{RewardDistribution, RiskCriterion};

fn main() {
    // The profit distribution of serving products {1, 2} with preferences
    // (0.5, 0.5) and profits (0.3, 0.9): no purchase pays 0 half the time.
    let assortment = RewardDistribution::from_assortment(&[1, 2], &[0.5, 0.5], &[0.3, 0.9])
        .expect("valid assortment");
    // A safe and a risky lottery with the same mean.
    let safe = RewardDistribution::new([(0.5, 1.0)]).unwrap();
    let risky = RewardDistribution::new([(0.0, 0.5), (1.0, 0.5)]).unwrap();

    let criteria = [
        RiskCriterion::mean(),
        RiskCriterion::var(0.5).unwrap(),
        RiskCriterion::cvar(0.5).unwrap(),
        RiskCriterion::cvar(0.05).unwrap(),
        RiskCriterion::moment(2).unwrap(),
        RiskCriterion::entropy(1.0).unwrap(),
        RiskCriterion::below_target_semi_variance(0.5).unwrap(),
        RiskCriterion::NegativeVariance,
        RiskCriterion::mean_variance(1.0).unwrap(),
        RiskCriterion::sharpe(0.2, 0.01).unwrap(),
        RiskCriterion::sortino(0.2, 0.01).unwrap(),
    ];

    println!(
        "{:<16} {:>12} {:>12} {:>12} {:>10} {:>10}",
        "criterion", "assortment", "safe 0.5", "coin 0/1", "gamma1", "gamma2"
    );
    for criterion in &criteria {
        let constants = criterion.constants();
        println!(
            "{:<16} {:>12.6} {:>12.6} {:>12.6} {:>10.4} {:>10}",
            criterion.to_string(),
            criterion.evaluate(&assortment).unwrap(),
            criterion.evaluate(&safe).unwrap(),
            criterion.evaluate(&risky).unwrap(),
            constants.gamma1,
            constants
                .gamma2
                .map_or("-".to_string(), |g| format!("{g:.4}")),
        );
    }

    // Every risk-averse criterion prefers the safe lottery over the coin
    // flip even though the means agree.
    let cvar = RiskCriterion::cvar(0.5).unwrap();
    println!(
        "\nsame mean, different risk: cvar:0.5 scores safe {} vs coin {}",
        cvar.evaluate(&safe).unwrap(),
        cvar.evaluate(&risky).unwrap()
    );

    // Criteria on empirical data: the worst five percent of a payoff sample.
    let samples: Vec<f64> = (0..1000).map(|i| (i % 100) as f64 / 100.0).collect();
    let tail = RiskCriterion::cvar(0.05).unwrap();
    println!(
        "empirical cvar:0.05 over {} samples: {:.4}",
        samples.len(),
        tail.empirical_evaluate(&samples).unwrap()
    );
}
