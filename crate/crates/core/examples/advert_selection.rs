//! Ranks three hand-built candidates with the weighted selection function and
//! with a second-price auction.

use adexchange::selection::{self, ad_rank, AdvertContext, CampaignCostForm, WeightVector};

fn context(id: usize, ctr: f64, bid: f64, real: f64, spam_prob: f64) -> adexchange::Result<AdvertContext> {
    let value = selection::ad_value(ctr, bid, 1.2)?;
    Ok(AdvertContext {
        advert_id: id,
        an_satisfaction: selection::an_satisfaction(900, 1_000),
        advertiser_satisfaction: selection::advertiser_satisfaction(40, 12, value),
        spam_score: selection::spam_score(spam_prob)?,
        campaign_cost: selection::campaign_cost(bid, real, CampaignCostForm::Prose)?,
        fraud_publisher_score: selection::fraud_publisher_score(0.18)?,
        ad_value: value,
    })
}

fn main() -> adexchange::Result<()> {
    let bids = [(0, 0.9), (1, 1.1), (2, 0.5)];
    let contexts = vec![
        context(0, 0.30, 0.9, 0.8, 0.14)?,
        context(1, 0.05, 1.1, 0.4, 0.15)?,
        context(2, 0.60, 0.5, 0.6, 0.13)?,
    ];

    for (label, w) in [
        ("uniform", WeightVector::uniform()),
        ("ad value only", WeightVector::unit(5)),
        ("campaign cost only", WeightVector::unit(3)),
    ] {
        let ranks: Vec<String> = contexts.iter().map(|c| format!("{:.3}", ad_rank(c, &w))).collect();
        println!("{label:>20}: ranks [{}] -> advert {:?}", ranks.join(", "), selection::select_asf(&contexts, &w));
    }

    let gsp = selection::select_gsp(&bids).expect("non-empty");
    println!("gsp: advert {} wins and pays {:.2}", gsp.advert_id, gsp.price_charged);
    Ok(())
}
