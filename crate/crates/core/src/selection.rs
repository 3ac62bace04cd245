//! Advert Selection Function (ASF) variables, Ad Rank, and the two selection rules.
//!
//! All six variables are normalized to [0, 1]. Ratios whose denominator is
//! zero (entities that have not been seen yet) take the neutral value 0.5.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SUM_TOLERANCE: f64 = 1e-9;
const NEUTRAL_RATIO: f64 = 0.5;

/// The six ASF weights, in order: AN satisfaction, advertiser satisfaction,
/// spam adverts, campaign cost, fraud publisher, ad value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 6]", into = "[f64; 6]")]
pub struct WeightVector([f64; 6]);

impl WeightVector {
    pub fn new(weights: [f64; 6]) -> Result<Self> {
        if weights.iter().any(|w| !(0.0..=1.0).contains(w)) {
            return Err(Error::config(format!("weights must lie in [0, 1]: {weights:?}")));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::config(format!("weights must sum to 1, got {sum}")));
        }
        Ok(Self(weights))
    }

    pub fn uniform() -> Self {
        Self([1.0 / 6.0; 6])
    }

    /// All weight on a single variable.
    pub fn unit(index: usize) -> Self {
        let mut w = [0.0; 6];
        w[index] = 1.0;
        Self(w)
    }

    pub fn as_array(&self) -> [f64; 6] {
        self.0
    }

    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for i in 1..6 {
            if self.0[i] > self.0[best] {
                best = i;
            }
        }
        best
    }
}

impl Default for WeightVector {
    fn default() -> Self {
        Self::uniform()
    }
}

impl TryFrom<[f64; 6]> for WeightVector {
    type Error = Error;

    fn try_from(value: [f64; 6]) -> Result<Self> {
        Self::new(value)
    }
}

impl From<WeightVector> for [f64; 6] {
    fn from(w: WeightVector) -> Self {
        w.0
    }
}

/// One candidate advert's ASF inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdvertContext {
    pub advert_id: usize,
    pub an_satisfaction: f64,
    pub advertiser_satisfaction: f64,
    pub spam_score: f64,
    pub campaign_cost: f64,
    pub fraud_publisher_score: f64,
    pub ad_value: f64,
}

impl AdvertContext {
    pub fn variables(&self) -> [f64; 6] {
        [
            self.an_satisfaction,
            self.advertiser_satisfaction,
            self.spam_score,
            self.campaign_cost,
            self.fraud_publisher_score,
            self.ad_value,
        ]
    }
}

/// Orientation of the campaign-cost variable.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CampaignCostForm {
    /// `real / (advertiser + real)`: overpaying advertisers score towards zero.
    #[default]
    Prose,
    /// `advertiser / (advertiser + real)`.
    Printed,
}

fn ratio_or_neutral(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        NEUTRAL_RATIO
    } else {
        num / den
    }
}

fn check_probability(what: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::Probability { what, value })
    }
}

/// `1 - received / (received + delivered)`; closer to 1 means a more dissatisfied network.
pub fn an_satisfaction(received_visits: u64, delivered_visits: u64) -> f64 {
    let total = (received_visits + delivered_visits) as f64;
    if total == 0.0 {
        NEUTRAL_RATIO
    } else {
        1.0 - received_visits as f64 / total
    }
}

/// `potential / (potential + received) * ad_value`; closer to 1 means a more discontent advertiser.
pub fn advertiser_satisfaction(potential_visits: u64, received_visits: u64, ad_value: f64) -> f64 {
    let p = potential_visits as f64;
    ratio_or_neutral(p, p + received_visits as f64) * ad_value
}

pub fn spam_score(spam_prob: f64) -> Result<f64> {
    check_probability("spam_prob", spam_prob)?;
    Ok(1.0 - spam_prob)
}

pub fn campaign_cost(advertiser_price: f64, real_price: f64, form: CampaignCostForm) -> Result<f64> {
    if !(advertiser_price > 0.0) {
        return Err(Error::Price { what: "advertiser_price", value: advertiser_price });
    }
    if !(real_price > 0.0) {
        return Err(Error::Price { what: "real_price", value: real_price });
    }
    let numerator = match form {
        CampaignCostForm::Prose => real_price,
        CampaignCostForm::Printed => advertiser_price,
    };
    Ok(numerator / (advertiser_price + real_price))
}

pub fn fraud_publisher_score(fraud_prob: f64) -> Result<f64> {
    check_probability("fraud_prob", fraud_prob)?;
    Ok(1.0 - fraud_prob)
}

/// `ctr * cpc_bid / max_category_cpc`.
pub fn ad_value(ctr: f64, cpc_bid: f64, max_category_cpc: f64) -> Result<f64> {
    check_probability("ctr", ctr)?;
    if !(cpc_bid > 0.0) {
        return Err(Error::Price { what: "cpc_bid", value: cpc_bid });
    }
    if cpc_bid > max_category_cpc {
        return Err(Error::BidAboveCategoryMax { bid: cpc_bid, max: max_category_cpc });
    }
    Ok(ctr * cpc_bid / max_category_cpc)
}

/// Weighted sum of the six ASF variables.
pub fn ad_rank(ctx: &AdvertContext, w: &WeightVector) -> f64 {
    ctx.variables()
        .iter()
        .zip(w.0.iter())
        .map(|(x, theta)| x * theta)
        .sum()
}

/// Id with the highest rank; ties go to the lowest id.
pub fn argmax_rank(ranked: &[(usize, f64)]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for &(id, rank) in ranked {
        best = match best {
            Some((bid, brank)) if rank < brank || (rank == brank && id > bid) => Some((bid, brank)),
            _ => Some((id, rank)),
        };
    }
    best.map(|(id, _)| id)
}

/// ASF selection. `None` means no advert is served.
pub fn select_asf(candidates: &[AdvertContext], w: &WeightVector) -> Option<usize> {
    let ranked: Vec<(usize, f64)> = candidates
        .iter()
        .map(|c| (c.advert_id, ad_rank(c, w)))
        .collect();
    argmax_rank(&ranked)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GspOutcome {
    pub advert_id: usize,
    pub price_charged: f64,
}

/// Generalized second-price selection over `(advert_id, cpc_bid)` pairs.
///
/// The highest bid wins (lowest id on ties) and pays the highest bid among the
/// remaining candidates. A lone candidate pays its own bid.
pub fn select_gsp(candidates: &[(usize, f64)]) -> Option<GspOutcome> {
    let winner = argmax_rank(candidates)?;
    let mut winner_bid = 0.0;
    let mut second: Option<f64> = None;
    let mut skipped = false;
    for &(id, bid) in candidates {
        if id == winner && !skipped {
            winner_bid = bid;
            skipped = true;
            continue;
        }
        second = Some(second.map_or(bid, |s: f64| s.max(bid)));
    }
    Some(GspOutcome {
        advert_id: winner,
        price_charged: second.unwrap_or(winner_bid),
    })
}
