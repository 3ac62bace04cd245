//! Income ledger, the five economic penalties, and the performance metric.

use serde::{Deserialize, Serialize};

use crate::domain::{ClickRecord, WorldState};
use crate::error::{Error, Result};

/// Advertisers below this impression ratio trigger P1.
pub const MIN_IMPRESSION_RATIO: f64 = 0.25;
/// Bids above `real_price * OVERPAY_FACTOR` trigger P3.
pub const OVERPAY_FACTOR: f64 = 1.25;
/// Networks receiving fewer than `delivered * NETWORK_BALANCE_FACTOR` trigger P4.
pub const NETWORK_BALANCE_FACTOR: f64 = 0.75;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltyCoefficients {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub x4: f64,
    pub x5: f64,
}

impl PenaltyCoefficients {
    pub const fn uniform(x: f64) -> Self {
        Self { x1: x, x2: x, x3: x, x4: x, x5: x }
    }

    pub const fn zero() -> Self {
        Self::uniform(0.0)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, x) in [self.x1, self.x2, self.x3, self.x4, self.x5].iter().enumerate() {
            if !(x.is_finite() && *x >= 0.0) {
                return Err(Error::config(format!("penalty coefficient x{} must be >= 0, got {x}", i + 1)));
            }
        }
        Ok(())
    }
}

impl Default for PenaltyCoefficients {
    fn default() -> Self {
        Self::uniform(0.5)
    }
}

/// Dollar amount of one penalty plus the number of entities or events that triggered it.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PenaltyTerm {
    pub amount: f64,
    pub triggers: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PenaltyBreakdown {
    pub p1: PenaltyTerm,
    pub p2: PenaltyTerm,
    pub p3: PenaltyTerm,
    pub p4: PenaltyTerm,
    pub p5: PenaltyTerm,
}

impl PenaltyBreakdown {
    pub fn amounts(&self) -> [f64; 5] {
        [self.p1.amount, self.p2.amount, self.p3.amount, self.p4.amount, self.p5.amount]
    }

    pub fn total(&self) -> f64 {
        self.amounts().iter().sum()
    }
}

/// Appends a click to the ledger and updates every counter it touches.
pub fn record_click(world: &mut WorldState, record: ClickRecord) -> Result<()> {
    if !(record.price_charged >= 0.0) {
        return Err(Error::Price { what: "price_charged", value: record.price_charged });
    }
    let advert = world
        .adverts
        .get(record.advert_id)
        .ok_or(Error::UnknownEntity { kind: "advert", id: record.advert_id })?;
    if advert.advertiser_id != record.advertiser_id {
        return Err(Error::config(format!(
            "advert {} does not belong to advertiser {}",
            record.advert_id, record.advertiser_id
        )));
    }
    if record.publisher_id >= world.publishers.len() {
        return Err(Error::UnknownEntity { kind: "publisher", id: record.publisher_id });
    }
    if !world.advertiser_active(record.advertiser_id) {
        return Err(Error::Expelled { kind: "advertiser", id: record.advertiser_id });
    }
    if !world.publisher_active(record.publisher_id) {
        return Err(Error::Expelled { kind: "publisher", id: record.publisher_id });
    }

    let price = record.price_charged;
    world.income_total += price;

    let advertiser = &mut world.advertisers[record.advertiser_id];
    advertiser.clicks_received += 1;
    advertiser.revenue_paid += price;
    if record.was_spam_advert {
        advertiser.spam_clicks += 1;
    }

    let publisher = &mut world.publishers[record.publisher_id];
    publisher.clicks_total += 1;
    if record.was_fraudulent_click {
        publisher.fraudulent_clicks += 1;
    }
    let network_id = publisher.network_id;
    world.networks[network_id].income += price;

    world.click_ledger.push(record);
    Ok(())
}

/// Impression ratio used by P1; an advertiser never offered a visit counts as satisfied.
pub fn impression_ratio(received_impressions: u64, potential_visits: u64) -> f64 {
    if potential_visits == 0 {
        1.0
    } else {
        received_impressions as f64 / potential_visits as f64
    }
}

/// P1: every active advertiser below the impression-ratio floor costs `x1` times the
/// mean revenue of the active advertisers of its own network.
pub fn penalty_p1(world: &WorldState, x1: f64) -> PenaltyTerm {
    let mut term = PenaltyTerm::default();
    for network in &world.networks {
        if network.expelled {
            continue;
        }
        let active: Vec<_> = network
            .advertiser_ids
            .iter()
            .map(|&id| &world.advertisers[id])
            .filter(|a| !a.expelled)
            .collect();
        if active.is_empty() {
            continue;
        }
        let mean_revenue = active.iter().map(|a| a.revenue_paid).sum::<f64>() / active.len() as f64;
        for a in &active {
            if impression_ratio(a.received_impressions, a.potential_visits) < MIN_IMPRESSION_RATIO {
                term.amount += x1 * mean_revenue;
                term.triggers += 1;
            }
        }
    }
    term
}

/// P2: `x2` times the revenue of clicks on spam adverts.
pub fn penalty_p2(world: &WorldState, x2: f64) -> PenaltyTerm {
    let mut revenue = 0.0;
    let mut triggers = 0;
    for c in world.click_ledger.iter().filter(|c| c.was_spam_advert) {
        revenue += c.price_charged;
        triggers += 1;
    }
    PenaltyTerm { amount: x2 * revenue, triggers }
}

pub fn overpays(cpc_bid: f64, real_price: f64) -> bool {
    cpc_bid > OVERPAY_FACTOR * real_price
}

/// P3: `x3` times the revenue generated by advertisers bidding more than 25% above
/// market price. Evaluated per advert, so multi-advert advertisers are charged only
/// for the overpriced ones.
pub fn penalty_p3(world: &WorldState, x3: f64) -> PenaltyTerm {
    let mut revenue = vec![0.0; world.adverts.len()];
    for c in &world.click_ledger {
        revenue[c.advert_id] += c.price_charged;
    }
    let mut term = PenaltyTerm::default();
    for advertiser in &world.advertisers {
        let mut flagged = false;
        for &ad_id in &advertiser.adverts {
            let ad = &world.adverts[ad_id];
            if overpays(ad.cpc_bid, ad.real_price) {
                term.amount += x3 * revenue[ad_id];
                flagged = true;
            }
        }
        if flagged {
            term.triggers += 1;
        }
    }
    term
}

/// P4: `x4` times the income of each active network that receives fewer than 75%
/// of the visits it delivers.
pub fn penalty_p4(world: &WorldState, x4: f64) -> PenaltyTerm {
    let mut term = PenaltyTerm::default();
    for n in world.networks.iter().filter(|n| !n.expelled) {
        if (n.visits_received as f64) < NETWORK_BALANCE_FACTOR * n.visits_delivered as f64 {
            term.amount += x4 * n.income;
            term.triggers += 1;
        }
    }
    term
}

/// P5: `x5` times the value of fraudulent clicks.
pub fn penalty_p5(world: &WorldState, x5: f64) -> PenaltyTerm {
    let mut value = 0.0;
    let mut triggers = 0;
    for c in world.click_ledger.iter().filter(|c| c.was_fraudulent_click) {
        value += c.price_charged;
        triggers += 1;
    }
    PenaltyTerm { amount: x5 * value, triggers }
}

pub fn compute_penalties(world: &WorldState, x: &PenaltyCoefficients) -> PenaltyBreakdown {
    PenaltyBreakdown {
        p1: penalty_p1(world, x.x1),
        p2: penalty_p2(world, x.x2),
        p3: penalty_p3(world, x.x3),
        p4: penalty_p4(world, x.x4),
        p5: penalty_p5(world, x.x5),
    }
}

/// Income minus the sum of penalties. May be negative.
pub fn adx_performance(income: f64, penalties: &PenaltyBreakdown) -> f64 {
    income - penalties.total()
}
