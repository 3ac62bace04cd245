//! Compares GSP income when each network only serves its own publishers with
//! income when every network's adverts compete for every visit.

use adexchange::prelude::*;

fn main() -> adexchange::Result<()> {
    for seed in 0..5 {
        let world = generate_world(&WorldConfig::with_networks(5), seed)?;
        let income = |mode| -> adexchange::Result<f64> {
            let config = SimulationConfig {
                visits_total: 15_000,
                apply_penalties: false,
                ..SimulationConfig::gsp(mode)
            };
            Ok(simulate(world.clone(), &config, seed)?.income)
        };
        let independent = income(SimulationMode::GspIndependent)?;
        let collaborative = income(SimulationMode::GspCollaborative)?;
        println!(
            "seed {seed}: independent {independent:>9.2}  collaborative {collaborative:>9.2}  ratio {:.2}",
            collaborative / independent
        );
    }
    Ok(())
}
