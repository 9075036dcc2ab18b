//! The choice model and the serve-until-no-purchase episode loop.
//!
//! ```bash
//! cargo run --release --example episode_simulation
//! ```

use std::collections::BTreeMap;

use mnl_risk_bandit::{choice_probabilities, derive_rng, run_episode, sample_choice, Instance};

fn main() {
    let instance = Instance::new(
        vec![0.8, 0.4, 0.2],   // preference weights
        vec![0.25, 0.6, 1.0],  // profits
        2,
    )
    .unwrap();
    let assortment = [1, 2];

    // Exact choice probabilities vs a large sample.
    let exact = choice_probabilities(&assortment, instance.preferences()).unwrap();
    let mut rng = derive_rng(3, &[0]);
    let draws = 200_000;
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for _ in 0..draws {
        let choice = sample_choice(&assortment, instance.preferences(), &mut rng).unwrap();
        *counts.entry(choice).or_default() += 1;
    }
    println!("choice      exact      sampled");
    for (choice, probability) in &exact {
        let label = if *choice == 0 {
            "no-purchase".to_string()
        } else {
            format!("product {choice}")
        };
        println!(
            "{label:<11} {probability:.6}   {:.6}",
            counts[choice] as f64 / draws as f64
        );
    }

    // Episode lengths are geometric with mean 1 + sum of served preferences.
    let episodes = 100_000;
    let mut total_length = 0usize;
    let mut bought: BTreeMap<usize, usize> = BTreeMap::new();
    let mut truncated = 0usize;
    for _ in 0..episodes {
        let episode = run_episode(&assortment, &instance, &mut rng, 1_000_000).unwrap();
        total_length += episode.length;
        truncated += episode.truncated_by_horizon as usize;
        for (&product, &count) in &episode.purchases {
            *bought.entry(product).or_default() += count;
        }
    }
    let expected = 1.0
        + assortment
            .iter()
            .map(|&i| instance.preferences()[i - 1])
            .sum::<f64>();
    println!(
        "\nmean episode length over {episodes} episodes: {:.4} (expected {expected:.4}), {truncated} truncated",
        total_length as f64 / episodes as f64
    );

    // Purchases per episode estimate the preference weights without bias.
    println!("\nper-episode purchase means vs true preference weights:");
    for &product in &assortment {
        println!(
            "  product {product}: {:.4} vs {:.4}",
            bought[&product] as f64 / episodes as f64,
            instance.preferences()[product - 1]
        );
    }

    // A hard horizon cuts the episode short and flags it.
    let episode = run_episode(&assortment, &instance, &mut rng, 1).unwrap();
    println!(
        "\nwith one step left the episode has length {} and truncated = {}",
        episode.length, episode.truncated_by_horizon
    );
}
