//! Sweeps crossover and mutation probabilities on a tiny exchange and prints the
//! mean-fitness matrix.
//!
//! cargo run --release --example grid_search

use adexchange::experiments::{run_grid, ExperimentKind, ExperimentSpec, Summary};

fn main() -> adexchange::Result<()> {
    let spec = ExperimentSpec {
        network_counts: vec![2],
        replications: 2,
        visits_per_network: 1_000,
        population_size: 10,
        generations: 5,
        seed: 4,
        ..ExperimentSpec::new(ExperimentKind::Grid)
    };
    let Summary::Grid(g) = run_grid(&spec)?.summary else { unreachable!() };
    print!("cx\\mut");
    for m in &g.mutation_levels {
        print!("{m:>8.1}");
    }
    println!();
    for (cx, row) in g.crossover_levels.iter().zip(&g.matrix) {
        print!("{cx:>6.1}");
        for v in row {
            print!("{v:>8.0}");
        }
        println!();
    }
    println!("best ({:.1}, {:.1}) = {:.2}, grand mean {:.2}", g.best_crossover, g.best_mutation, g.best_mean, g.grand_mean);
    Ok(())
}
