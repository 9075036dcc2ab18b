//! Rolling empirical risk of the revealed profits: a risk-aware agent versus
//! a baseline that only cares about expected revenue.
//!
//! On instances where the risk-optimal assortment differs from the
//! revenue-optimal one, the baseline converges to the wrong assortment and
//! its realized tail risk stays depressed.
//!
//! ```bash
//! cargo run --release --example rolling_risk
//! ```

use mnl_risk_bandit::seeding::{PURPOSE_INSTANCE, PURPOSE_SIMULATION};
use mnl_risk_bandit::{
    derive_rng, generate_instance, optimize_exact, rolling_risk, run_simulation, Algorithm,
    Instance, OptimizerMode, RiskCriterion,
};

/// First generated instance whose risk optimum differs from the mean optimum.
fn differing_instance(criterion: &RiskCriterion) -> (u64, Instance) {
    for seed in 0.. {
        let mut rng = derive_rng(seed, &[PURPOSE_INSTANCE, 0]);
        let instance = generate_instance(8, 3, &mut rng).unwrap();
        let risk_opt = optimize_exact(instance.preferences(), instance.profits(), 3, criterion)
            .unwrap()
            .assortment;
        let mean_opt = optimize_exact(
            instance.preferences(),
            instance.profits(),
            3,
            &RiskCriterion::mean(),
        )
        .unwrap()
        .assortment;
        if risk_opt != mean_opt {
            return (seed, instance);
        }
    }
    unreachable!()
}

fn main() {
    let criterion = RiskCriterion::cvar(0.5).unwrap();
    let (seed, instance) = differing_instance(&criterion);
    let optimum = optimize_exact(instance.preferences(), instance.profits(), 3, &criterion).unwrap();
    let revenue_opt = optimize_exact(
        instance.preferences(),
        instance.profits(),
        3,
        &RiskCriterion::mean(),
    )
    .unwrap();
    println!("instance seed {seed}:");
    println!("  cvar:0.5-optimal assortment {:?} with value {:.4}", optimum.assortment, optimum.value);
    println!("  mean-optimal assortment     {:?}", revenue_opt.assortment);

    let horizon = 60_000;
    let window = 3000;
    let mut table: Vec<(Algorithm, Vec<f64>)> = Vec::new();
    for algorithm in [Algorithm::RiskTs, Algorithm::BaselineTs] {
        let mut rng = derive_rng(seed, &[PURPOSE_SIMULATION, 0]);
        let trajectory = run_simulation(
            &instance,
            algorithm,
            &criterion,
            horizon,
            OptimizerMode::Exact,
            &mut rng,
        )
        .unwrap();
        let rolling = rolling_risk(&trajectory, &criterion, window).unwrap();
        println!(
            "\n{algorithm}: final cumulative regret {:.1}",
            trajectory.final_regret()
        );
        table.push((algorithm, rolling));
    }

    println!("\nrolling cvar:0.5 per window of {window} profits (optimum {:.4}):", optimum.value);
    println!("{:>8} {:>12} {:>12}", "window", "risk-ts", "ts");
    for i in 0..horizon / window {
        println!(
            "{:>8} {:>12.4} {:>12.4}",
            i, table[0].1[i], table[1].1[i]
        );
    }
}
