//! Find risk-optimal assortments, exhaustively and by local search.
//!
//! ```bash
//! cargo run --release --example assortment_search
//! ```

use mnl_risk_bandit::{
    derive_rng, generate_instance, optimize_exact, optimize_local, optimize_local_random_init,
    RiskCriterion,
};

fn main() {
    // A ten-product instance; different criteria pick different assortments.
    let mut rng = derive_rng(2, &[1, 0]);
    let instance = generate_instance(10, 4, &mut rng).unwrap();
    println!("preferences: {:?}", rounded(instance.preferences()));
    println!("profits:     {:?}", rounded(instance.profits()));

    let criteria = [
        RiskCriterion::mean(),
        RiskCriterion::cvar(0.5).unwrap(),
        RiskCriterion::entropy(2.0).unwrap(),
        RiskCriterion::mean_variance(3.0).unwrap(),
        RiskCriterion::sharpe(0.2, 0.01).unwrap(),
    ];
    println!(
        "\n{:<14} {:>18} {:>12} {:>13}",
        "criterion", "optimal assortment", "value", "evaluations"
    );
    for criterion in &criteria {
        let result = optimize_exact(
            instance.preferences(),
            instance.profits(),
            instance.cardinality_limit(),
            criterion,
        )
        .unwrap();
        println!(
            "{:<14} {:>18} {:>12.6} {:>13}",
            criterion.to_string(),
            format!("{:?}", result.assortment),
            result.value,
            result.evaluations
        );
    }

    // Two hundred products: enumeration is off the table, local search
    // climbs add/delete/swap moves to a certified local optimum.
    let mut rng = derive_rng(2, &[1, 1]);
    let large = generate_instance(200, 10, &mut rng).unwrap();
    let criterion = RiskCriterion::cvar(0.5).unwrap();
    match optimize_exact(large.preferences(), large.profits(), 10, &criterion) {
        Err(err) => println!("\nexhaustive search on 200 products: {err}"),
        Ok(_) => unreachable!("200 products cannot be enumerated"),
    }

    // Tail criteria score every small assortment zero, so the empty set is a
    // flat local optimum; a random full-size start gets the climb moving.
    let stuck = optimize_local(large.preferences(), large.profits(), 10, &criterion, &[]).unwrap();
    println!(
        "climb from the empty set: assortment {:?} value {:.6}",
        stuck.assortment, stuck.value
    );
    let local =
        optimize_local_random_init(large.preferences(), large.profits(), 10, &criterion, &mut rng)
            .unwrap();
    println!(
        "climb from a random start: assortment {:?} value {:.6} after {} evaluations",
        local.assortment, local.value, local.evaluations
    );

    // Restarting from the found optimum terminates immediately.
    let again = optimize_local(
        large.preferences(),
        large.profits(),
        10,
        &criterion,
        &local.assortment,
    )
    .unwrap();
    assert_eq!(again.assortment, local.assortment);
    println!("restart from the optimum stays put ({} evaluations)", again.evaluations);
}

fn rounded(values: &[f64]) -> Vec<f64> {
    values.iter().map(|v| (v * 100.0).round() / 100.0).collect()
}
