//! Deterministic simulator of a collaborative real-time-bidding ad exchange.
//!
//! Adverts compete for publisher visits either through a generalized
//! second-price auction or through a six-variable weighted Advert Selection
//! Function (ASF). The exchange charges economic penalties when its objectives
//! are missed, expels fraudulent participants at periodic checkpoints, and a
//! genetic algorithm tunes the ASF weights against income minus penalties.
//!
//! ```no_run
//! use adexchange::prelude::*;
//!
//! let world = generate_world(&WorldConfig::with_networks(5), 42)?;
//! let config = SimulationConfig {
//!     visits_total: 15_000,
//!     ..SimulationConfig::gsp(SimulationMode::GspCollaborative)
//! };
//! let report = simulate(world, &config, 7)?;
//! println!("income {:.2}, performance {:.2}", report.income, report.performance);
//! # Ok::<(), adexchange::Error>(())
//! ```

pub mod accounting;
pub mod domain;
pub mod error;
pub mod experiments;
pub mod ga;
pub mod governance;
pub mod rng;
pub mod selection;
pub mod simulation;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::accounting::{adx_performance, compute_penalties, PenaltyBreakdown, PenaltyCoefficients};
    pub use crate::domain::{generate_world, Category, WorldConfig, WorldState};
    pub use crate::ga::{optimize, GaConfig, GaOutcome};
    pub use crate::governance::RuleThresholds;
    pub use crate::selection::{select_asf, select_gsp, AdvertContext, CampaignCostForm, WeightVector};
    pub use crate::simulation::{simulate, SimulationConfig, SimulationMode, SimulationReport};
    pub use crate::Error;
}
