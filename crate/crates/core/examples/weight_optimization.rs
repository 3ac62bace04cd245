//! Evolves selection weights with the genetic algorithm and compares the result
//! with penalized GSP on the same visit stream.
//!
//! cargo run --release --example weight_optimization

use adexchange::prelude::*;

fn main() -> adexchange::Result<()> {
    let world = generate_world(&WorldConfig::with_networks(5), 1)?;
    let sim = SimulationConfig { visits_total: 15_000, ..SimulationConfig::default() };
    let ga = GaConfig { population_size: 20, generations: 20, seed: 1, ..GaConfig::default() };

    let outcome = optimize(&world, &sim, &ga)?;
    for g in outcome.history.iter().step_by(4) {
        println!("generation {:>3}: best {:>9.2} mean {:>9.2}", g.generation, g.best_fitness, g.mean_fitness);
    }
    println!("weights {:.3?}", outcome.best_weights.as_array());

    let gsp = SimulationConfig { mode: SimulationMode::GspCollaborative, ..sim };
    let baseline = simulate(world, &gsp, outcome.evaluation_seed)?;
    println!("ga {:.2} vs gsp {:.2} over {} evaluations", outcome.best_fitness, baseline.performance, outcome.evaluations);
    Ok(())
}
