//! Entities of the exchange and world generation.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};

/// Page / advert category. Adverts only compete for visits of their own category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Category(pub u32);

/// Closed interval used for uniformly drawn attributes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformRange {
    pub lo: f64,
    pub hi: f64,
}

impl UniformRange {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        if self.lo == self.hi {
            self.lo
        } else {
            rng.gen_range(self.lo..=self.hi)
        }
    }

    fn validate(&self, what: &str) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite()) || self.lo > self.hi {
            return Err(Error::config(format!(
                "{what} range [{}, {}] is not a valid interval",
                self.lo, self.hi
            )));
        }
        Ok(())
    }

    fn validate_probability(&self, what: &str) -> Result<()> {
        self.validate(what)?;
        if self.lo < 0.0 || self.hi > 1.0 {
            return Err(Error::config(format!("{what} range must lie inside [0, 1]")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Advert {
    pub id: usize,
    pub advertiser_id: usize,
    pub category: Category,
    pub cpc_bid: f64,
    /// Market value of the click.
    pub real_price: f64,
    pub ctr: f64,
    /// Detector's belief that the advert is spam.
    pub spam_prob: f64,
    /// Ground-truth spam label, drawn once from `spam_prob` at generation.
    pub is_spam: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Advertiser {
    pub id: usize,
    pub network_id: usize,
    pub adverts: Vec<usize>,
    /// Visits for which one of the advertiser's adverts was an eligible candidate.
    pub potential_visits: u64,
    pub received_impressions: u64,
    /// Impressions of adverts labelled spam.
    pub spam_impressions: u64,
    pub clicks_received: u64,
    pub spam_clicks: u64,
    pub revenue_paid: f64,
    pub expelled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Publisher {
    pub id: usize,
    pub network_id: usize,
    pub category: Category,
    pub fraud_prob: f64,
    pub clicks_total: u64,
    pub fraudulent_clicks: u64,
    pub expelled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdNetwork {
    pub id: usize,
    pub advertiser_ids: Vec<usize>,
    pub publisher_ids: Vec<usize>,
    /// Impressions the network's adverts obtained on other networks' publishers.
    pub visits_received: u64,
    /// Visits of the network's publishers handed to other networks' adverts.
    pub visits_delivered: u64,
    /// Click revenue earned on the network's publishers.
    pub income: f64,
    pub expelled: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Visit {
    /// 1-based position in the visit stream.
    pub seq: u64,
    pub publisher_id: usize,
    pub category: Category,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClickRecord {
    pub visit_seq: u64,
    pub advert_id: usize,
    pub advertiser_id: usize,
    pub publisher_id: usize,
    pub price_charged: f64,
    pub was_spam_advert: bool,
    pub was_fraudulent_click: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WorldConfig {
    pub networks: usize,
    pub advertisers_per_network: usize,
    pub publishers_per_network: usize,
    pub adverts_per_advertiser: usize,
    pub categories: u32,
    pub cpc_bid: UniformRange,
    pub real_price: UniformRange,
    pub ctr: UniformRange,
    pub spam_prob: UniformRange,
    pub fraud_prob: UniformRange,
}

impl Default for WorldConfig {
    fn default() -> Self {
        Self {
            networks: 10,
            advertisers_per_network: 10,
            publishers_per_network: 100,
            adverts_per_advertiser: 1,
            categories: 20,
            cpc_bid: UniformRange::new(0.2, 1.2),
            real_price: UniformRange::new(0.2, 1.2),
            ctr: UniformRange::new(0.0, 1.0),
            spam_prob: UniformRange::new(0.13, 0.16),
            fraud_prob: UniformRange::new(0.17, 0.20),
        }
    }
}

impl WorldConfig {
    pub fn with_networks(networks: usize) -> Self {
        Self { networks, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.networks == 0 {
            return Err(Error::config("at least one ad network is required"));
        }
        if self.advertisers_per_network == 0 {
            return Err(Error::config("advertisers_per_network must be at least 1"));
        }
        if self.publishers_per_network == 0 {
            return Err(Error::config("publishers_per_network must be at least 1"));
        }
        if self.adverts_per_advertiser == 0 {
            return Err(Error::config("adverts_per_advertiser must be at least 1"));
        }
        if self.categories == 0 {
            return Err(Error::config("at least one category is required"));
        }
        self.cpc_bid.validate("cpc_bid")?;
        self.real_price.validate("real_price")?;
        if self.cpc_bid.lo <= 0.0 || self.real_price.lo <= 0.0 {
            return Err(Error::config("prices must be strictly positive"));
        }
        self.ctr.validate_probability("ctr")?;
        self.spam_prob.validate_probability("spam_prob")?;
        self.fraud_prob.validate_probability("fraud_prob")?;
        Ok(())
    }
}

/// The whole exchange. A plain value: clone it to run independent simulations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldState {
    pub categories: u32,
    pub networks: Vec<AdNetwork>,
    pub advertisers: Vec<Advertiser>,
    pub publishers: Vec<Publisher>,
    pub adverts: Vec<Advert>,
    pub rng_seed: u64,
    pub visit_count_processed: u64,
    pub income_total: f64,
    pub click_ledger: Vec<ClickRecord>,
    /// Highest bid per category among active adverts; refreshed at checkpoints.
    pub max_category_cpc: Vec<f64>,
}

/// Builds a world whose attributes are drawn from `config` using the world stream of `seed`.
pub fn generate_world(config: &WorldConfig, seed: u64) -> Result<WorldState> {
    config.validate()?;
    let mut rng = stream_rng(seed, Stream::World, 0);

    let mut networks = Vec::with_capacity(config.networks);
    let mut advertisers = Vec::new();
    let mut publishers = Vec::new();
    let mut adverts = Vec::new();

    for network_id in 0..config.networks {
        let mut advertiser_ids = Vec::with_capacity(config.advertisers_per_network);
        for _ in 0..config.advertisers_per_network {
            let advertiser_id = advertisers.len();
            let mut owned = Vec::with_capacity(config.adverts_per_advertiser);
            for _ in 0..config.adverts_per_advertiser {
                let id = adverts.len();
                let category = Category(rng.gen_range(0..config.categories));
                let cpc_bid = config.cpc_bid.sample(&mut rng);
                let real_price = config.real_price.sample(&mut rng);
                let ctr = config.ctr.sample(&mut rng);
                let spam_prob = config.spam_prob.sample(&mut rng);
                let is_spam = rng.gen::<f64>() < spam_prob;
                adverts.push(Advert {
                    id,
                    advertiser_id,
                    category,
                    cpc_bid,
                    real_price,
                    ctr,
                    spam_prob,
                    is_spam,
                });
                owned.push(id);
            }
            advertisers.push(Advertiser::new(advertiser_id, network_id, owned));
            advertiser_ids.push(advertiser_id);
        }

        let mut publisher_ids = Vec::with_capacity(config.publishers_per_network);
        for _ in 0..config.publishers_per_network {
            let id = publishers.len();
            let category = Category(rng.gen_range(0..config.categories));
            let fraud_prob = config.fraud_prob.sample(&mut rng);
            publishers.push(Publisher::new(id, network_id, category, fraud_prob));
            publisher_ids.push(id);
        }

        networks.push(AdNetwork::new(network_id, advertiser_ids, publisher_ids));
    }

    let mut world = WorldState {
        categories: config.categories,
        networks,
        advertisers,
        publishers,
        adverts,
        rng_seed: seed,
        visit_count_processed: 0,
        income_total: 0.0,
        click_ledger: Vec::new(),
        max_category_cpc: Vec::new(),
    };
    world.recompute_category_max();
    Ok(world)
}

impl Advertiser {
    pub fn new(id: usize, network_id: usize, adverts: Vec<usize>) -> Self {
        Self {
            id,
            network_id,
            adverts,
            potential_visits: 0,
            received_impressions: 0,
            spam_impressions: 0,
            clicks_received: 0,
            spam_clicks: 0,
            revenue_paid: 0.0,
            expelled: false,
        }
    }
}

impl Publisher {
    pub fn new(id: usize, network_id: usize, category: Category, fraud_prob: f64) -> Self {
        Self {
            id,
            network_id,
            category,
            fraud_prob,
            clicks_total: 0,
            fraudulent_clicks: 0,
            expelled: false,
        }
    }
}

impl AdNetwork {
    pub fn new(id: usize, advertiser_ids: Vec<usize>, publisher_ids: Vec<usize>) -> Self {
        Self {
            id,
            advertiser_ids,
            publisher_ids,
            visits_received: 0,
            visits_delivered: 0,
            income: 0.0,
            expelled: false,
        }
    }
}

impl WorldState {
    /// Assembles a world from explicit entities; ids must equal vector positions.
    pub fn from_parts(
        categories: u32,
        networks: Vec<AdNetwork>,
        advertisers: Vec<Advertiser>,
        publishers: Vec<Publisher>,
        adverts: Vec<Advert>,
    ) -> Result<Self> {
        let mut world = WorldState {
            categories,
            networks,
            advertisers,
            publishers,
            adverts,
            rng_seed: 0,
            visit_count_processed: 0,
            income_total: 0.0,
            click_ledger: Vec::new(),
            max_category_cpc: Vec::new(),
        };
        world.check_consistency()?;
        world.recompute_category_max();
        Ok(world)
    }

    fn check_consistency(&self) -> Result<()> {
        if self.categories == 0 {
            return Err(Error::config("at least one category is required"));
        }
        let bad = |kind: &str, pos: usize| Error::config(format!("{kind} at position {pos} has a mismatched id"));
        for (i, n) in self.networks.iter().enumerate() {
            if n.id != i {
                return Err(bad("network", i));
            }
        }
        for (i, a) in self.advertisers.iter().enumerate() {
            if a.id != i || a.network_id >= self.networks.len() {
                return Err(bad("advertiser", i));
            }
        }
        for (i, p) in self.publishers.iter().enumerate() {
            if p.id != i || p.network_id >= self.networks.len() || p.category.0 >= self.categories {
                return Err(bad("publisher", i));
            }
        }
        for (i, ad) in self.adverts.iter().enumerate() {
            if ad.id != i || ad.advertiser_id >= self.advertisers.len() || ad.category.0 >= self.categories {
                return Err(bad("advert", i));
            }
            if ad.cpc_bid <= 0.0 {
                return Err(Error::Price { what: "cpc_bid", value: ad.cpc_bid });
            }
            if ad.real_price <= 0.0 {
                return Err(Error::Price { what: "real_price", value: ad.real_price });
            }
        }
        Ok(())
    }

    pub fn network_active(&self, id: usize) -> bool {
        !self.networks[id].expelled
    }

    pub fn advertiser_active(&self, id: usize) -> bool {
        let a = &self.advertisers[id];
        !a.expelled && self.network_active(a.network_id)
    }

    pub fn publisher_active(&self, id: usize) -> bool {
        let p = &self.publishers[id];
        !p.expelled && self.network_active(p.network_id)
    }

    pub fn advert_active(&self, id: usize) -> bool {
        self.advertiser_active(self.adverts[id].advertiser_id)
    }

    pub fn advert_network(&self, advert_id: usize) -> usize {
        self.advertisers[self.adverts[advert_id].advertiser_id].network_id
    }

    /// Recomputes the per-category maximum bid over active adverts.
    pub fn recompute_category_max(&mut self) {
        let mut max = vec![0.0_f64; self.categories as usize];
        for ad in &self.adverts {
            if self.advert_active(ad.id) {
                let slot = &mut max[ad.category.0 as usize];
                if ad.cpc_bid > *slot {
                    *slot = ad.cpc_bid;
                }
            }
        }
        self.max_category_cpc = max;
    }

    pub fn ledger_income(&self) -> f64 {
        self.click_ledger.iter().map(|c| c.price_charged).sum()
    }

    /// Pretty JSON snapshot. Field order follows the struct declarations, so
    /// output is stable for a given world.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let world: WorldState = serde_json::from_str(text)?;
        world.check_consistency()?;
        Ok(world)
    }
}
