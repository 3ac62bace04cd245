//! The visit loop: pick a publisher, gather category-matching candidates, select
//! an advert, realize the click, and run the expulsion rules every checkpoint.

use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::accounting::{self, PenaltyBreakdown, PenaltyCoefficients};
use crate::domain::{ClickRecord, Visit, WorldState};
use crate::error::{Error, Result};
use crate::governance::{self, ExpulsionEvent, RuleThresholds};
use crate::rng::VisitStreams;
use crate::selection::{self, AdvertContext, CampaignCostForm, WeightVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimulationMode {
    /// Weighted ASF selection across all networks; the advertiser pays its own bid.
    Asf,
    /// Second-price auction across all networks.
    GspCollaborative,
    /// Second-price auction restricted to the visited publisher's own network.
    GspIndependent,
}

impl SimulationMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SimulationMode::Asf => "asf",
            SimulationMode::GspCollaborative => "gsp_collaborative",
            SimulationMode::GspIndependent => "gsp_independent",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub mode: SimulationMode,
    pub visits_total: u64,
    pub weights: Option<WeightVector>,
    pub coefficients: PenaltyCoefficients,
    pub thresholds: RuleThresholds,
    pub apply_penalties: bool,
    pub campaign_cost_form: CampaignCostForm,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            mode: SimulationMode::GspCollaborative,
            visits_total: 150_000,
            weights: None,
            coefficients: PenaltyCoefficients::default(),
            thresholds: RuleThresholds::default(),
            apply_penalties: true,
            campaign_cost_form: CampaignCostForm::default(),
        }
    }
}

impl SimulationConfig {
    pub fn asf(weights: WeightVector) -> Self {
        Self {
            mode: SimulationMode::Asf,
            weights: Some(weights),
            ..Self::default()
        }
    }

    pub fn gsp(mode: SimulationMode) -> Self {
        Self { mode, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.mode == SimulationMode::Asf && self.weights.is_none() {
            return Err(Error::config("asf mode requires a weight vector"));
        }
        self.validate_base()
    }

    /// Everything but the mode/weights pairing, for callers that supply weights later.
    pub fn validate_base(&self) -> Result<()> {
        self.coefficients.validate()?;
        self.thresholds.validate()
    }

    /// Short hex digest identifying this configuration.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(&Sha256::digest(&bytes)[..8])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkStats {
    pub id: usize,
    pub income: f64,
    pub visits_received: u64,
    pub visits_delivered: u64,
    pub expelled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdvertiserStats {
    pub id: usize,
    pub network_id: usize,
    pub potential_visits: u64,
    pub received_impressions: u64,
    pub clicks_received: u64,
    pub spam_clicks: u64,
    pub revenue_paid: f64,
    pub expelled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PublisherStats {
    pub id: usize,
    pub network_id: usize,
    pub clicks_total: u64,
    pub fraudulent_clicks: u64,
    pub expelled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub mode: SimulationMode,
    pub seed: u64,
    pub config_digest: String,
    pub visits: u64,
    pub impressions: u64,
    pub clicks: u64,
    pub income: f64,
    pub penalties: PenaltyBreakdown,
    pub performance: f64,
    pub networks: Vec<NetworkStats>,
    pub advertisers: Vec<AdvertiserStats>,
    pub publishers: Vec<PublisherStats>,
    pub expulsions: Vec<ExpulsionEvent>,
    pub ledger_digest: String,
}

impl SimulationReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// What happened on one visit.
#[derive(Debug, Clone, PartialEq)]
pub struct ServeOutcome {
    pub advert_id: Option<usize>,
    pub click: Option<ClickRecord>,
}

fn pick_publisher(active: &[usize], u: f64) -> Option<usize> {
    if active.is_empty() {
        return None;
    }
    let idx = ((u * active.len() as f64) as usize).min(active.len() - 1);
    Some(active[idx])
}

fn active_publishers(world: &WorldState) -> Vec<usize> {
    (0..world.publishers.len()).filter(|&id| world.publisher_active(id)).collect()
}

/// Draws the next visit uniformly over active publishers. `None` once every
/// publisher has been expelled.
pub fn next_visit<R: Rng>(world: &WorldState, seq: u64, rng: &mut R) -> Option<Visit> {
    let u: f64 = rng.gen();
    visit_for(world, seq, pick_publisher(&active_publishers(world), u)?)
}

fn visit_for(world: &WorldState, seq: u64, publisher_id: usize) -> Option<Visit> {
    Some(Visit {
        seq,
        publisher_id,
        category: world.publishers[publisher_id].category,
    })
}

/// Active adverts eligible for `visit` under `mode`, in id order.
pub fn candidate_ids(world: &WorldState, visit: &Visit, mode: SimulationMode) -> Vec<usize> {
    let home = world.publishers[visit.publisher_id].network_id;
    world
        .adverts
        .iter()
        .filter(|ad| ad.category == visit.category && world.advert_active(ad.id))
        .filter(|ad| mode != SimulationMode::GspIndependent || world.advert_network(ad.id) == home)
        .map(|ad| ad.id)
        .collect()
}

/// ASF inputs for one advert shown on `visit`'s publisher, from current world statistics.
pub fn advert_context(
    world: &WorldState,
    advert_id: usize,
    visit: &Visit,
    form: CampaignCostForm,
) -> Result<AdvertContext> {
    let ad = &world.adverts[advert_id];
    let advertiser = &world.advertisers[ad.advertiser_id];
    let network = &world.networks[advertiser.network_id];
    let publisher = &world.publishers[visit.publisher_id];
    let value = selection::ad_value(ad.ctr, ad.cpc_bid, world.max_category_cpc[ad.category.0 as usize])?;
    Ok(AdvertContext {
        advert_id,
        an_satisfaction: selection::an_satisfaction(network.visits_received, network.visits_delivered),
        advertiser_satisfaction: selection::advertiser_satisfaction(
            advertiser.potential_visits,
            advertiser.received_impressions,
            value,
        ),
        spam_score: selection::spam_score(ad.spam_prob)?,
        campaign_cost: selection::campaign_cost(ad.cpc_bid, ad.real_price, form)?,
        fraud_publisher_score: selection::fraud_publisher_score(publisher.fraud_prob)?,
        ad_value: value,
    })
}

/// Candidate contexts for `visit`. An empty list means the visit goes unserved.
pub fn candidates(
    world: &WorldState,
    visit: &Visit,
    mode: SimulationMode,
    form: CampaignCostForm,
) -> Result<Vec<AdvertContext>> {
    candidate_ids(world, visit, mode)
        .into_iter()
        .map(|id| advert_context(world, id, visit, form))
        .collect()
}

/// Serves one visit: selection, impression and network-balance counters, click and
/// fraud realization. Draws exactly two uniforms from `rng` whatever happens.
pub fn serve<R: Rng>(world: &mut WorldState, visit: &Visit, config: &SimulationConfig, rng: &mut R) -> Result<ServeOutcome> {
    let ids = candidate_ids(world, visit, config.mode);
    serve_candidates(world, visit, config, rng, &ids)
}

/// Active adverts grouped by category, rebuilt whenever expulsions change.
struct CandidateIndex {
    by_category: Vec<Vec<usize>>,
}

impl CandidateIndex {
    fn build(world: &WorldState) -> Self {
        let mut by_category = vec![Vec::new(); world.categories as usize];
        for ad in world.adverts.iter().filter(|ad| world.advert_active(ad.id)) {
            by_category[ad.category.0 as usize].push(ad.id);
        }
        Self { by_category }
    }

    fn fill(&self, world: &WorldState, visit: &Visit, mode: SimulationMode, out: &mut Vec<usize>) {
        out.clear();
        let all = &self.by_category[visit.category.0 as usize];
        if mode == SimulationMode::GspIndependent {
            let home = world.publishers[visit.publisher_id].network_id;
            out.extend(all.iter().copied().filter(|&id| world.advert_network(id) == home));
        } else {
            out.extend_from_slice(all);
        }
    }
}

fn serve_candidates<R: Rng>(
    world: &mut WorldState,
    visit: &Visit,
    config: &SimulationConfig,
    rng: &mut R,
    ids: &[usize],
) -> Result<ServeOutcome> {
    let u_click: f64 = rng.gen();
    let u_fraud: f64 = rng.gen();
    world.visit_count_processed += 1;

    let selected = match config.mode {
        SimulationMode::Asf => {
            let weights = config
                .weights
                .as_ref()
                .ok_or_else(|| Error::config("asf mode requires a weight vector"))?;
            let mut best: Option<(usize, f64)> = None;
            for &id in ids {
                let rank = selection::ad_rank(&advert_context(world, id, visit, config.campaign_cost_form)?, weights);
                // ids ascend, so strict comparison keeps the lowest id on ties
                if best.map_or(true, |(_, r)| rank > r) {
                    best = Some((id, rank));
                }
            }
            best.map(|(id, _)| (id, world.adverts[id].cpc_bid))
        }
        SimulationMode::GspCollaborative | SimulationMode::GspIndependent => {
            let bids: Vec<(usize, f64)> = ids.iter().map(|&id| (id, world.adverts[id].cpc_bid)).collect();
            selection::select_gsp(&bids).map(|o| (o.advert_id, o.price_charged))
        }
    };

    let mut seen: Vec<usize> = Vec::with_capacity(ids.len());
    for &id in ids {
        let advertiser_id = world.adverts[id].advertiser_id;
        if !seen.contains(&advertiser_id) {
            seen.push(advertiser_id);
            world.advertisers[advertiser_id].potential_visits += 1;
        }
    }

    let Some((advert_id, price)) = selected else {
        return Ok(ServeOutcome { advert_id: None, click: None });
    };

    let ad = world.adverts[advert_id].clone();
    let advertiser = &mut world.advertisers[ad.advertiser_id];
    advertiser.received_impressions += 1;
    if ad.is_spam {
        advertiser.spam_impressions += 1;
    }
    let advert_network = advertiser.network_id;
    let publisher = &world.publishers[visit.publisher_id];
    let publisher_network = publisher.network_id;
    let fraud_prob = publisher.fraud_prob;
    if advert_network != publisher_network {
        world.networks[advert_network].visits_received += 1;
        world.networks[publisher_network].visits_delivered += 1;
    }

    let click = if u_click < ad.ctr {
        let record = ClickRecord {
            visit_seq: visit.seq,
            advert_id,
            advertiser_id: ad.advertiser_id,
            publisher_id: visit.publisher_id,
            price_charged: price,
            was_spam_advert: ad.is_spam,
            was_fraudulent_click: u_fraud < fraud_prob,
        };
        accounting::record_click(world, record.clone())?;
        Some(record)
    } else {
        None
    };

    Ok(ServeOutcome { advert_id: Some(advert_id), click })
}

/// Runs `config.visits_total` visits on `world` and returns the final world with its report.
pub fn run(mut world: WorldState, config: &SimulationConfig, seed: u64) -> Result<(WorldState, SimulationReport)> {
    config.validate()?;
    world.recompute_category_max();
    let interval = config.thresholds.checkpoint_interval;
    let mut active = active_publishers(&world);
    let mut expulsions = Vec::new();
    let mut impressions = 0;
    let streams = VisitStreams::new(seed);
    let mut index = CandidateIndex::build(&world);
    let mut ids = Vec::new();

    for seq in 1..=config.visits_total {
        let mut rng = streams.for_visit(seq);
        let u: f64 = rng.gen();
        match pick_publisher(&active, u).and_then(|p| visit_for(&world, seq, p)) {
            Some(visit) => {
                index.fill(&world, &visit, config.mode, &mut ids);
                if serve_candidates(&mut world, &visit, config, &mut rng, &ids)?.advert_id.is_some() {
                    impressions += 1;
                }
            }
            None => world.visit_count_processed += 1,
        }
        if world.visit_count_processed % interval == 0 {
            let events = governance::checkpoint(&mut world, &config.thresholds);
            if !events.is_empty() {
                active = active_publishers(&world);
                index = CandidateIndex::build(&world);
                expulsions.extend(events);
            }
        }
    }

    let income = world.income_total;
    let penalties = if config.apply_penalties {
        accounting::compute_penalties(&world, &config.coefficients)
    } else {
        PenaltyBreakdown::default()
    };
    let report = SimulationReport {
        mode: config.mode,
        seed,
        config_digest: config.digest(),
        visits: config.visits_total,
        impressions,
        clicks: world.click_ledger.len() as u64,
        income,
        performance: accounting::adx_performance(income, &penalties),
        penalties,
        networks: world
            .networks
            .iter()
            .map(|n| NetworkStats {
                id: n.id,
                income: n.income,
                visits_received: n.visits_received,
                visits_delivered: n.visits_delivered,
                expelled: n.expelled,
            })
            .collect(),
        advertisers: world
            .advertisers
            .iter()
            .map(|a| AdvertiserStats {
                id: a.id,
                network_id: a.network_id,
                potential_visits: a.potential_visits,
                received_impressions: a.received_impressions,
                clicks_received: a.clicks_received,
                spam_clicks: a.spam_clicks,
                revenue_paid: a.revenue_paid,
                expelled: a.expelled,
            })
            .collect(),
        publishers: world
            .publishers
            .iter()
            .map(|p| PublisherStats {
                id: p.id,
                network_id: p.network_id,
                clicks_total: p.clicks_total,
                fraudulent_clicks: p.fraudulent_clicks,
                expelled: p.expelled,
            })
            .collect(),
        expulsions,
        ledger_digest: ledger_digest(&world.click_ledger),
    };
    Ok((world, report))
}

pub fn simulate(world: WorldState, config: &SimulationConfig, seed: u64) -> Result<SimulationReport> {
    run(world, config, seed).map(|(_, report)| report)
}

fn ledger_digest(ledger: &[ClickRecord]) -> String {
    let mut h = Sha256::new();
    for c in ledger {
        h.update(c.visit_seq.to_le_bytes());
        h.update((c.advert_id as u64).to_le_bytes());
        h.update((c.publisher_id as u64).to_le_bytes());
        h.update(c.price_charged.to_bits().to_le_bytes());
        h.update([c.was_spam_advert as u8, c.was_fraudulent_click as u8]);
    }
    hex::encode(&h.finalize()[..8])
}
