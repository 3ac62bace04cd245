//! Builds a two-network exchange with one publisher that only produces
//! fraudulent clicks and watches the checkpoints expel it.

use adexchange::domain::{AdNetwork, Advert, Advertiser, Category, Publisher, WorldState};
use adexchange::governance::RuleThresholds;
use adexchange::simulation::{run, SimulationConfig, SimulationMode};

fn main() -> adexchange::Result<()> {
    let adverts = (0..4)
        .map(|id| Advert {
            id,
            advertiser_id: id,
            category: Category(0),
            cpc_bid: 0.5 + 0.1 * id as f64,
            real_price: 0.6,
            ctr: 1.0,
            spam_prob: 0.14,
            is_spam: false,
        })
        .collect();
    let advertisers = (0..4).map(|id| Advertiser::new(id, id / 2, vec![id])).collect();
    let publishers = vec![
        Publisher::new(0, 0, Category(0), 1.0),
        Publisher::new(1, 0, Category(0), 0.0),
        Publisher::new(2, 1, Category(0), 0.0),
        Publisher::new(3, 1, Category(0), 0.0),
    ];
    let networks = vec![AdNetwork::new(0, vec![0, 1], vec![0, 1]), AdNetwork::new(1, vec![2, 3], vec![2, 3])];
    let world = WorldState::from_parts(1, networks, advertisers, publishers, adverts)?;

    let config = SimulationConfig {
        visits_total: 5_000,
        thresholds: RuleThresholds { checkpoint_interval: 100, ..RuleThresholds::default() },
        ..SimulationConfig::gsp(SimulationMode::GspCollaborative)
    };
    let (world, report) = run(world, &config, 5)?;
    for e in &report.expulsions {
        println!("visit {:>5}: {:?} expelled entity {}", e.visit_seq, e.rule, e.entity_id);
    }
    let p = &world.publishers[0];
    println!("fraudulent publisher: {} clicks, {} fraudulent, expelled {}", p.clicks_total, p.fraudulent_clicks, p.expelled);
    Ok(())
}
