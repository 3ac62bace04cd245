//! Generates a seeded exchange and prints what each network holds.
//!
//! cargo run --example world_generation -- [networks] [seed]

use adexchange::prelude::*;

fn main() -> adexchange::Result<()> {
    let mut args = std::env::args().skip(1);
    let networks = args.next().and_then(|a| a.parse().ok()).unwrap_or(3);
    let seed = args.next().and_then(|a| a.parse().ok()).unwrap_or(42);

    let world = generate_world(&WorldConfig::with_networks(networks), seed)?;
    println!(
        "{} networks, {} advertisers, {} publishers, {} adverts over {} categories",
        world.networks.len(),
        world.advertisers.len(),
        world.publishers.len(),
        world.adverts.len(),
        world.categories
    );
    for n in &world.networks {
        let spam = n
            .advertiser_ids
            .iter()
            .flat_map(|&a| &world.advertisers[a].adverts)
            .filter(|&&ad| world.adverts[ad].is_spam)
            .count();
        println!("network {}: {} advertisers ({spam} spam adverts), {} publishers", n.id, n.advertiser_ids.len(), n.publisher_ids.len());
    }
    let ad = &world.adverts[0];
    println!(
        "advert 0: category {} bid {:.3} real {:.3} ctr {:.3} spam_prob {:.3}",
        ad.category.0, ad.cpc_bid, ad.real_price, ad.ctr, ad.spam_prob
    );

    // snapshots round-trip exactly
    let restored = WorldState::from_json(&world.to_json()?)?;
    assert_eq!(restored, world);
    println!("snapshot round-trip ok");
    Ok(())
}
