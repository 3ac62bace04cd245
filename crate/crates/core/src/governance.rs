//! Expulsion rules R1-R3, evaluated at fixed visit checkpoints.

use serde::{Deserialize, Serialize};

use crate::domain::{AdNetwork, Advertiser, Publisher, WorldState};
use crate::error::{Error, Result};

/// How R3 decides whether a network member counts as fraudulent.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MemberFraudTest {
    /// The member was expelled by R1/R2 or currently meets its full rule, volume gate included.
    #[default]
    Gated,
    /// The member's fraud fraction exceeds the threshold, whatever its volume.
    Ungated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RuleThresholds {
    pub fraud_fraction: f64,
    pub advertiser_min_adverts: u64,
    pub publisher_min_clicks: u64,
    pub network_min_visits: u64,
    pub checkpoint_interval: u64,
    pub member_test: MemberFraudTest,
}

impl Default for RuleThresholds {
    fn default() -> Self {
        Self {
            fraud_fraction: 0.20,
            advertiser_min_adverts: 200,
            publisher_min_clicks: 30,
            network_min_visits: 2_000,
            checkpoint_interval: 1_000,
            member_test: MemberFraudTest::Gated,
        }
    }
}

impl RuleThresholds {
    pub fn validate(&self) -> Result<()> {
        if !(self.fraud_fraction > 0.0 && self.fraud_fraction < 1.0) {
            return Err(Error::config("fraud_fraction must lie in (0, 1)"));
        }
        if self.advertiser_min_adverts == 0
            || self.publisher_min_clicks == 0
            || self.network_min_visits == 0
            || self.checkpoint_interval == 0
        {
            return Err(Error::config("rule thresholds and checkpoint interval must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rule {
    R1,
    R2,
    R3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpulsionEvent {
    pub visit_seq: u64,
    pub rule: Rule,
    pub entity_id: usize,
}

fn fraction(part: u64, whole: u64) -> f64 {
    if whole == 0 {
        0.0
    } else {
        part as f64 / whole as f64
    }
}

fn advertiser_spam_heavy(a: &Advertiser, t: &RuleThresholds) -> bool {
    fraction(a.spam_impressions, a.received_impressions) > t.fraud_fraction
}

fn publisher_fraud_heavy(p: &Publisher, t: &RuleThresholds) -> bool {
    fraction(p.fraudulent_clicks, p.clicks_total) > t.fraud_fraction
}

/// R1: more than 20% of displayed adverts were spam, over more than 200 displays.
pub fn rule_r1(advertiser: &Advertiser, t: &RuleThresholds) -> bool {
    advertiser.received_impressions > t.advertiser_min_adverts && advertiser_spam_heavy(advertiser, t)
}

/// R2: more than 20% of clicks were fraudulent, over more than 30 clicks.
pub fn rule_r2(publisher: &Publisher, t: &RuleThresholds) -> bool {
    publisher.clicks_total > t.publisher_min_clicks && publisher_fraud_heavy(publisher, t)
}

/// R3: 20% or more of the members are fraudulent and the network has seen more
/// than 2,000 cross-network visits (received plus delivered).
pub fn rule_r3(network: &AdNetwork, fraudulent_members: usize, total_members: usize, t: &RuleThresholds) -> bool {
    if total_members == 0 {
        return false;
    }
    let share = fraudulent_members as f64 / total_members as f64;
    share >= t.fraud_fraction && network.visits_received + network.visits_delivered > t.network_min_visits
}

/// Number of members of `network` counted as fraudulent by R3.
pub fn fraudulent_members(world: &WorldState, network: &AdNetwork, t: &RuleThresholds) -> usize {
    let advertisers = network.advertiser_ids.iter().map(|&id| &world.advertisers[id]);
    let publishers = network.publisher_ids.iter().map(|&id| &world.publishers[id]);
    match t.member_test {
        MemberFraudTest::Gated => {
            advertisers.filter(|a| a.expelled || rule_r1(a, t)).count()
                + publishers.filter(|p| p.expelled || rule_r2(p, t)).count()
        }
        MemberFraudTest::Ungated => {
            advertisers.filter(|a| advertiser_spam_heavy(a, t)).count()
                + publishers.filter(|p| publisher_fraud_heavy(p, t)).count()
        }
    }
}

/// Applies R1, R2 and R3 in that order, then refreshes per-category maximum bids.
/// Returns the expulsions made, stamped with the current visit count.
pub fn checkpoint(world: &mut WorldState, t: &RuleThresholds) -> Vec<ExpulsionEvent> {
    let visit_seq = world.visit_count_processed;
    let mut events = Vec::new();

    for id in 0..world.advertisers.len() {
        if world.advertiser_active(id) && rule_r1(&world.advertisers[id], t) {
            world.advertisers[id].expelled = true;
            events.push(ExpulsionEvent { visit_seq, rule: Rule::R1, entity_id: id });
        }
    }
    for id in 0..world.publishers.len() {
        if world.publisher_active(id) && rule_r2(&world.publishers[id], t) {
            world.publishers[id].expelled = true;
            events.push(ExpulsionEvent { visit_seq, rule: Rule::R2, entity_id: id });
        }
    }
    let mut expel_networks = Vec::new();
    for network in world.networks.iter().filter(|n| !n.expelled) {
        let members = network.advertiser_ids.len() + network.publisher_ids.len();
        let fraudulent = fraudulent_members(world, network, t);
        if rule_r3(network, fraudulent, members, t) {
            expel_networks.push(network.id);
        }
    }
    for id in expel_networks {
        world.networks[id].expelled = true;
        events.push(ExpulsionEvent { visit_seq, rule: Rule::R3, entity_id: id });
    }

    world.recompute_category_max();
    events
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Category;

    fn advertiser(impressions: u64, spam: u64) -> Advertiser {
        let mut a = Advertiser::new(0, 0, vec![0]);
        a.received_impressions = impressions;
        a.spam_impressions = spam;
        a
    }

    fn publisher(clicks: u64, fraud: u64) -> Publisher {
        let mut p = Publisher::new(0, 0, Category(0), 0.2);
        p.clicks_total = clicks;
        p.fraudulent_clicks = fraud;
        p
    }

    #[test]
    fn r1_cases() {
        let t = RuleThresholds::default();
        assert!(rule_r1(&advertiser(250, 60), &t));
        assert!(!rule_r1(&advertiser(150, 75), &t));
        assert!(!rule_r1(&advertiser(250, 50), &t));
    }

    #[test]
    fn r2_cases() {
        let t = RuleThresholds::default();
        assert!(rule_r2(&publisher(40, 10), &t));
        assert!(!rule_r2(&publisher(29, 29), &t));
        assert!(!rule_r2(&publisher(100, 20), &t));
    }

    #[test]
    fn r3_cases() {
        let t = RuleThresholds::default();
        let mut n = AdNetwork::new(0, vec![], vec![]);
        n.visits_received = 1_500;
        n.visits_delivered = 1_500;
        assert!(rule_r3(&n, 22, 110, &t));
        assert!(!rule_r3(&n, 10, 110, &t));
        n.visits_delivered = 0;
        assert!(!rule_r3(&n, 22, 110, &t));
    }

    #[test]
    fn thresholds_validate() {
        assert!(RuleThresholds::default().validate().is_ok());
        let bad = RuleThresholds { fraud_fraction: 1.0, ..RuleThresholds::default() };
        assert!(bad.validate().is_err());
        let bad = RuleThresholds { checkpoint_interval: 0, ..RuleThresholds::default() };
        assert!(bad.validate().is_err());
    }
}
