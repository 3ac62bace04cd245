//! TOML experiment configuration. Every key is optional; keys present override
//! the experiment defaults, and command-line flags override the file.
//!
//! ```toml
//! seed = 7
//! network_counts = [5]
//! replications = 10
//! scale_factor = 0.1
//!
//! [coefficients]
//! x2 = 3.0
//!
//! [thresholds]
//! checkpoint_interval = 500
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::Result;
use crate::governance::RuleThresholds;
use crate::selection::CampaignCostForm;

use super::{Exp2Target, ExperimentSpec, ReportFormat};

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientOverrides {
    pub x1: Option<f64>,
    pub x2: Option<f64>,
    pub x3: Option<f64>,
    pub x4: Option<f64>,
    pub x5: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub network_counts: Option<Vec<usize>>,
    pub replications: Option<usize>,
    pub scale_factor: Option<f64>,
    pub visits_per_network: Option<u64>,
    pub population_size: Option<usize>,
    pub generations: Option<usize>,
    pub crossover_prob: Option<f64>,
    pub mutation_prob: Option<f64>,
    pub elitism_fraction: Option<f64>,
    pub coefficients: Option<CoefficientOverrides>,
    pub amplified_x2: Option<f64>,
    pub exp2_target: Option<Exp2Target>,
    pub exp2_baseline: Option<bool>,
    pub thresholds: Option<RuleThresholds>,
    pub campaign_cost_form: Option<CampaignCostForm>,
    pub record_runtime: Option<bool>,
    pub out_dir: Option<PathBuf>,
    pub format: Option<ReportFormat>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn apply(&self, spec: &mut ExperimentSpec) {
        macro_rules! set {
            ($($field:ident),*) => {
                $(if let Some(v) = &self.$field {
                    spec.$field = v.clone();
                })*
            };
        }
        set!(
            seed,
            network_counts,
            replications,
            scale_factor,
            visits_per_network,
            population_size,
            generations,
            crossover_prob,
            mutation_prob,
            elitism_fraction,
            amplified_x2,
            exp2_target,
            exp2_baseline,
            thresholds,
            campaign_cost_form,
            record_runtime,
            out_dir,
            format
        );
        if let Some(c) = &self.coefficients {
            let x = &mut spec.coefficients;
            for (slot, v) in [(&mut x.x1, c.x1), (&mut x.x2, c.x2), (&mut x.x3, c.x3), (&mut x.x4, c.x4), (&mut x.x5, c.x5)] {
                if let Some(v) = v {
                    *slot = v;
                }
            }
        }
    }
}
