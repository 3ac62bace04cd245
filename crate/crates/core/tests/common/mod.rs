#![allow(dead_code)]

pub mod penalty_oracle;

use adexchange::domain::{AdNetwork, Advert, Advertiser, Category, Publisher, WorldState};
use adexchange::ga::GenerationStats;
use rand::Rng;

/// Small random exchange: `networks` networks, `advertisers` advertisers spread
/// round-robin over them with one advert each, and two publishers per network.
pub fn micro_world<R: Rng>(rng: &mut R, networks: usize, advertisers: usize, categories: u32) -> WorldState {
    let adverts: Vec<Advert> = (0..advertisers)
        .map(|id| {
            let spam_prob = rng.gen_range(0.0..0.5);
            Advert {
                id,
                advertiser_id: id,
                category: Category(rng.gen_range(0..categories)),
                cpc_bid: rng.gen_range(0.2..1.2),
                real_price: rng.gen_range(0.2..1.2),
                ctr: rng.gen_range(0.0..1.0),
                spam_prob,
                is_spam: rng.gen_bool(spam_prob),
            }
        })
        .collect();
    let advertisers_v: Vec<Advertiser> = (0..advertisers).map(|id| Advertiser::new(id, id % networks, vec![id])).collect();
    let publishers: Vec<Publisher> = (0..networks * 2)
        .map(|id| Publisher::new(id, id / 2, Category(rng.gen_range(0..categories)), rng.gen_range(0.0..0.5)))
        .collect();
    let nets = (0..networks)
        .map(|n| {
            AdNetwork::new(
                n,
                (0..advertisers).filter(|a| a % networks == n).collect(),
                vec![2 * n, 2 * n + 1],
            )
        })
        .collect();
    WorldState::from_parts(categories, nets, advertisers_v, publishers, adverts).expect("consistent micro world")
}

/// Best-so-far fitness never decreases across generations.
pub fn assert_elitist(history: &[GenerationStats]) {
    let mut best = f64::NEG_INFINITY;
    for g in history {
        assert!(
            g.best_fitness >= best,
            "generation {} best {} fell below earlier best {}",
            g.generation,
            g.best_fitness,
            best
        );
        best = g.best_fitness;
    }
}
