//! Independent re-computation of the five penalties from a flat event log.

use adexchange::accounting::{record_click, PenaltyCoefficients};
use adexchange::domain::{ClickRecord, WorldState};
use adexchange::rng::SimRng;
use rand::{Rng, SeedableRng};

/// Everything the penalty engine may see, as a flat event list.
#[derive(Debug, Clone)]
pub enum Event {
    Offered { advertiser: usize },
    Shown { advertiser: usize, spam: bool },
    CrossNetwork { advert_network: usize, publisher_network: usize },
    Click(ClickRecord),
}

pub fn random_events<R: Rng>(rng: &mut R, world: &WorldState, n: usize) -> Vec<Event> {
    (0..n)
        .map(|seq| match rng.gen_range(0..4) {
            0 => Event::Offered { advertiser: rng.gen_range(0..world.advertisers.len()) },
            1 => Event::Shown { advertiser: rng.gen_range(0..world.advertisers.len()), spam: rng.gen() },
            2 => Event::CrossNetwork {
                advert_network: rng.gen_range(0..world.networks.len()),
                publisher_network: rng.gen_range(0..world.networks.len()),
            },
            _ => {
                let ad = &world.adverts[rng.gen_range(0..world.adverts.len())];
                Event::Click(ClickRecord {
                    visit_seq: seq as u64,
                    advert_id: ad.id,
                    advertiser_id: ad.advertiser_id,
                    publisher_id: rng.gen_range(0..world.publishers.len()),
                    price_charged: rng.gen_range(0.0..1.2),
                    was_spam_advert: ad.is_spam,
                    was_fraudulent_click: rng.gen_bool(0.3),
                })
            }
        })
        .collect()
}

pub fn apply(world: &mut WorldState, events: &[Event]) {
    for e in events {
        match e {
            Event::Offered { advertiser } => world.advertisers[*advertiser].potential_visits += 1,
            Event::Shown { advertiser, spam } => {
                let a = &mut world.advertisers[*advertiser];
                a.received_impressions += 1;
                a.spam_impressions += *spam as u64;
            }
            Event::CrossNetwork { advert_network, publisher_network } => {
                world.networks[*advert_network].visits_received += 1;
                world.networks[*publisher_network].visits_delivered += 1;
            }
            Event::Click(c) => record_click(world, c.clone()).unwrap(),
        }
    }
}

/// Recomputes P1..P5 by replaying `events` into plain tables.
pub fn replay_oracle(world: &WorldState, events: &[Event], x: &PenaltyCoefficients) -> [(f64, u64); 5] {
    let n_adv = world.advertisers.len();
    let n_net = world.networks.len();
    let mut offered = vec![0u64; n_adv];
    let mut shown = vec![0u64; n_adv];
    let mut revenue = vec![0.0f64; n_adv];
    let mut received = vec![0u64; n_net];
    let mut delivered = vec![0u64; n_net];
    let mut net_income = vec![0.0f64; n_net];
    let mut spam_revenue = 0.0;
    let mut spam_clicks = 0;
    let mut fraud_value = 0.0;
    let mut fraud_clicks = 0;
    let mut clicks: Vec<&ClickRecord> = Vec::new();
    for e in events {
        match e {
            Event::Offered { advertiser } => offered[*advertiser] += 1,
            Event::Shown { advertiser, .. } => shown[*advertiser] += 1,
            Event::CrossNetwork { advert_network, publisher_network } => {
                received[*advert_network] += 1;
                delivered[*publisher_network] += 1;
            }
            Event::Click(c) => {
                revenue[c.advertiser_id] += c.price_charged;
                net_income[world.publishers[c.publisher_id].network_id] += c.price_charged;
                if c.was_spam_advert {
                    spam_revenue += c.price_charged;
                    spam_clicks += 1;
                }
                if c.was_fraudulent_click {
                    fraud_value += c.price_charged;
                    fraud_clicks += 1;
                }
                clicks.push(c);
            }
        }
    }

    let mut p1 = (0.0, 0);
    for net in world.networks.iter().filter(|n| !n.expelled) {
        let members: Vec<usize> = net.advertiser_ids.iter().copied().filter(|&a| !world.advertisers[a].expelled).collect();
        if members.is_empty() {
            continue;
        }
        let mut total = 0.0;
        for &a in &members {
            total += revenue[a];
        }
        let mean = total / members.len() as f64;
        for &a in &members {
            let starved = offered[a] > 0 && (shown[a] as f64) < 0.25 * offered[a] as f64;
            if starved {
                p1.0 += x.x1 * mean;
                p1.1 += 1;
            }
        }
    }

    let mut p3 = (0.0, 0);
    for adv in &world.advertisers {
        let mut flagged = false;
        for &ad_id in &adv.adverts {
            let ad = &world.adverts[ad_id];
            if ad.cpc_bid > 1.25 * ad.real_price {
                let mut r = 0.0;
                for c in clicks.iter().filter(|c| c.advert_id == ad_id) {
                    r += c.price_charged;
                }
                p3.0 += x.x3 * r;
                flagged = true;
            }
        }
        p3.1 += flagged as u64;
    }

    let mut p4 = (0.0, 0);
    for net in world.networks.iter().filter(|n| !n.expelled) {
        if (received[net.id] as f64) < 0.75 * delivered[net.id] as f64 {
            p4.0 += x.x4 * net_income[net.id];
            p4.1 += 1;
        }
    }

    [p1, (x.x2 * spam_revenue, spam_clicks), p3, p4, (x.x5 * fraud_value, fraud_clicks)]
}


/// Random world plus event log with up to `max_events` events, applied to the world,
/// followed by random expulsions. Returns the world, its events and coefficients.
pub fn random_case(seed: u64, max_events: usize) -> (WorldState, Vec<Event>, PenaltyCoefficients) {
    let mut rng = SimRng::seed_from_u64(seed);
    let networks = rng.gen_range(1..4);
    let advertisers = rng.gen_range(1..8);
    let mut world = super::micro_world(&mut rng, networks, advertisers, 3);
    let n_events = rng.gen_range(0..=max_events);
    let events = random_events(&mut rng, &world, n_events);
    apply(&mut world, &events);
    // expulsions after the fact exercise the active-member filters
    for a in &mut world.advertisers {
        a.expelled = rng.gen_bool(0.1);
    }
    for n in &mut world.networks {
        n.expelled = rng.gen_bool(0.1);
    }
    let x = PenaltyCoefficients {
        x1: rng.gen_range(0.0..3.0),
        x2: rng.gen_range(0.0..3.0),
        x3: rng.gen_range(0.0..3.0),
        x4: rng.gen_range(0.0..3.0),
        x5: rng.gen_range(0.0..3.0),
    };
    (world, events, x)
}
