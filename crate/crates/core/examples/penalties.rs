//! Runs collaborative GSP and breaks its income down into the five penalties,
//! once with the default coefficients and once with spam clicks priced higher.

use adexchange::prelude::*;

fn main() -> adexchange::Result<()> {
    let world = generate_world(&WorldConfig::with_networks(5), 3)?;
    for coefficients in [PenaltyCoefficients::uniform(0.5), PenaltyCoefficients { x2: 3.0, ..PenaltyCoefficients::uniform(0.5) }] {
        let config = SimulationConfig {
            visits_total: 15_000,
            coefficients,
            ..SimulationConfig::gsp(SimulationMode::GspCollaborative)
        };
        let report = simulate(world.clone(), &config, 11)?;
        let p = report.penalties;
        println!("x = {coefficients:?}");
        println!("  income      {:>10.2}", report.income);
        for (name, term) in [("P1 impressions", p.p1), ("P2 spam", p.p2), ("P3 overpay", p.p3), ("P4 balance", p.p4), ("P5 fraud", p.p5)] {
            println!("  {name:<15} {:>10.2}  ({} triggers)", term.amount, term.triggers);
        }
        println!("  performance {:>10.2}", report.performance);
    }
    Ok(())
}
