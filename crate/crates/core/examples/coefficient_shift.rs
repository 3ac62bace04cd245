//! Raises the spam-click penalty coefficient and compares the optimized
//! weights with the unshifted baseline on paired seeds.
//!
//! cargo run --release --example coefficient_shift

use adexchange::experiments::{run_exp2, ExperimentKind, ExperimentSpec, Summary};

fn main() -> adexchange::Result<()> {
    let spec = ExperimentSpec {
        network_counts: vec![3],
        replications: 4,
        visits_per_network: 3_000,
        population_size: 12,
        generations: 10,
        seed: 2,
        ..ExperimentSpec::new(ExperimentKind::Exp2Coeff)
    };
    let output = run_exp2(&spec)?;
    if let Summary::Exp2(rows) = &output.summary {
        for r in rows {
            println!("x2 = {}: mean fitness {:.2} (min {:.2}, max {:.2}, std {:.2})", r.x2, r.stats.mean, r.stats.min, r.stats.max, r.stats.std_dev);
            println!("  mean weights {:.3?}", r.mean_weights);
            if let Some(b) = &r.baseline {
                println!("x2 = {}: mean fitness {:.2}", b.x2, b.stats.mean);
                println!("  mean weights {:.3?}", b.mean_weights);
                println!("theta{} rose in {} of {} paired runs", r.target_weight, b.target_increase_runs, r.replications);
            }
        }
    }
    Ok(())
}
