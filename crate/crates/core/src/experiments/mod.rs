//! Replicated experiment harnesses: GSP income with and without collaboration,
//! GA against penalized GSP, the spam-coefficient shift, and the crossover and
//! mutation grid. Replications run in parallel; results are joined in order.

pub mod config;
pub mod report;

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::accounting::PenaltyCoefficients;
use crate::domain::{generate_world, WorldConfig, WorldState};
use crate::error::{Error, Result};
use crate::ga::{self, GaConfig, GaOutcome, GenerationStats};
use crate::governance::RuleThresholds;
use crate::rng::{derive_seed, Stream};
use crate::selection::CampaignCostForm;
use crate::simulation::{simulate, SimulationConfig, SimulationMode, SimulationReport};

pub use report::{emit_history, emit_report, read_rows, ReplicationRow, ReportFormat, COLUMNS};

pub const MIN_VISITS: u64 = 1_000;
pub const MIN_POPULATION: usize = 10;
pub const MIN_GENERATIONS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Exp1Gsp,
    Exp1GaVsGsp,
    Exp2Coeff,
    Grid,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::Exp1Gsp => "exp1_gsp",
            ExperimentKind::Exp1GaVsGsp => "exp1_ga_vs_gsp",
            ExperimentKind::Exp2Coeff => "exp2_coeff",
            ExperimentKind::Grid => "grid",
        }
    }

    pub fn default_replications(self) -> usize {
        match self {
            ExperimentKind::Grid => 10,
            _ => 30,
        }
    }
}

/// Which weight the spam-coefficient experiment expects to grow.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exp2Target {
    /// The spam variable's weight.
    #[default]
    Theta3,
    /// The advertiser-satisfaction weight, as the experiment's printed formula names it.
    Theta2,
}

impl Exp2Target {
    pub fn index(self) -> usize {
        match self {
            Exp2Target::Theta3 => 2,
            Exp2Target::Theta2 => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub experiment: ExperimentKind,
    pub network_counts: Vec<usize>,
    pub replications: usize,
    /// Shrinks visits, population and generations; 1.0 is full size.
    pub scale_factor: f64,
    pub seed: u64,
    pub visits_per_network: u64,
    pub population_size: usize,
    pub generations: usize,
    pub crossover_prob: f64,
    pub mutation_prob: f64,
    pub elitism_fraction: f64,
    pub coefficients: PenaltyCoefficients,
    /// x2 used by the coefficient-shift experiment.
    pub amplified_x2: f64,
    pub exp2_target: Exp2Target,
    /// Also run the unshifted coefficients on the same seeds.
    pub exp2_baseline: bool,
    pub thresholds: RuleThresholds,
    pub campaign_cost_form: CampaignCostForm,
    /// Wall-clock timings make output nondeterministic, so they are off by default.
    pub record_runtime: bool,
    pub out_dir: PathBuf,
    pub format: ReportFormat,
}

impl ExperimentSpec {
    pub fn new(experiment: ExperimentKind) -> Self {
        Self {
            experiment,
            network_counts: vec![10, 20, 30, 40, 50],
            replications: experiment.default_replications(),
            scale_factor: 1.0,
            seed: 0,
            visits_per_network: 15_000,
            population_size: 100,
            generations: 100,
            crossover_prob: 0.7,
            mutation_prob: 0.2,
            elitism_fraction: 0.05,
            coefficients: PenaltyCoefficients::uniform(0.5),
            amplified_x2: 3.0,
            exp2_target: Exp2Target::Theta3,
            exp2_baseline: true,
            thresholds: RuleThresholds::default(),
            campaign_cost_form: CampaignCostForm::default(),
            record_runtime: false,
            out_dir: PathBuf::from("out"),
            format: ReportFormat::Csv,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::config("replications must be at least 1"));
        }
        if !(self.scale_factor > 0.0 && self.scale_factor <= 1.0) {
            return Err(Error::config(format!("scale_factor must lie in (0, 1], got {}", self.scale_factor)));
        }
        if self.network_counts.is_empty() || self.network_counts.contains(&0) {
            return Err(Error::config("network_counts must be a non-empty list of positive counts"));
        }
        if self.visits_per_network == 0 {
            return Err(Error::config("visits_per_network must be positive"));
        }
        if !(self.amplified_x2.is_finite() && self.amplified_x2 >= 0.0) {
            return Err(Error::config("amplified_x2 must be >= 0"));
        }
        self.coefficients.validate()?;
        self.thresholds.validate()?;
        self.ga_config(0).validate()
    }

    fn scaled(&self) -> bool {
        self.scale_factor < 1.0
    }

    /// Visits per simulation for a world of `n_networks`.
    pub fn visits_for(&self, n_networks: usize) -> u64 {
        let full = self.visits_per_network * n_networks as u64;
        if self.scaled() {
            ((full as f64 * self.scale_factor).floor() as u64).max(MIN_VISITS)
        } else {
            full
        }
    }

    pub fn scaled_population(&self) -> usize {
        scale_count(self.population_size, self.scale_factor, MIN_POPULATION)
    }

    pub fn scaled_generations(&self) -> usize {
        scale_count(self.generations, self.scale_factor, MIN_GENERATIONS)
    }

    pub fn replication_seed(&self, replication: usize) -> u64 {
        derive_seed(self.seed, Stream::Replication, replication as u64)
    }

    pub fn world(&self, n_networks: usize, replication: usize) -> Result<WorldState> {
        let seed = derive_seed(self.replication_seed(replication), Stream::World, n_networks as u64);
        generate_world(&WorldConfig::with_networks(n_networks), seed)
    }

    pub fn simulation_config(&self, mode: SimulationMode, n_networks: usize) -> SimulationConfig {
        SimulationConfig {
            mode,
            visits_total: self.visits_for(n_networks),
            weights: None,
            coefficients: self.coefficients,
            thresholds: self.thresholds,
            apply_penalties: true,
            campaign_cost_form: self.campaign_cost_form,
        }
    }

    pub fn ga_config(&self, replication: usize) -> GaConfig {
        GaConfig {
            population_size: self.scaled_population(),
            generations: self.scaled_generations(),
            crossover_prob: self.crossover_prob,
            mutation_prob: self.mutation_prob,
            elitism_fraction: self.elitism_fraction,
            seed: self.replication_seed(replication),
        }
    }

    fn jobs(&self) -> Vec<(usize, usize)> {
        self.network_counts
            .iter()
            .flat_map(|&n| (0..self.replications).map(move |r| (n, r)))
            .collect()
    }
}

fn scale_count(full: usize, factor: f64, floor: usize) -> usize {
    if factor < 1.0 {
        ((full as f64 * factor).floor() as usize).max(floor)
    } else {
        full
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub max: f64,
    pub mean: f64,
    pub min: f64,
    /// Sample standard deviation; zero for a single value.
    pub std_dev: f64,
}

impl SummaryStats {
    pub fn from_values(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let mean = (values.iter().sum::<f64>() / n).clamp(min, max);
        let std_dev = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Some(Self { max, mean, min, std_dev })
    }
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

struct Timer(Option<Instant>);

impl Timer {
    fn start(enabled: bool) -> Self {
        Timer(enabled.then(Instant::now))
    }

    fn ms(&self) -> u64 {
        self.0.map_or(0, |t| t.elapsed().as_millis() as u64)
    }
}

fn gsp_row(experiment: &str, n: usize, rep: usize, report: &SimulationReport, runtime_ms: u64) -> ReplicationRow {
    ReplicationRow::new(
        experiment,
        n,
        report.mode.as_str(),
        report.seed,
        rep,
        report.income,
        &report.penalties,
        report.performance,
        None,
        runtime_ms,
    )
}

/// Re-simulates the GA's best weights so the row carries income and penalties.
fn ga_row(
    experiment: &str,
    mode: &str,
    n: usize,
    rep: usize,
    world: &WorldState,
    sim: &SimulationConfig,
    outcome: &GaOutcome,
    runtime_ms: u64,
) -> Result<(ReplicationRow, RunHistory)> {
    let config = SimulationConfig {
        mode: SimulationMode::Asf,
        weights: Some(outcome.best_weights),
        ..sim.clone()
    };
    let report = simulate(world.clone(), &config, outcome.evaluation_seed)?;
    let row = ReplicationRow::new(
        experiment,
        n,
        mode,
        outcome.evaluation_seed,
        rep,
        report.income,
        &report.penalties,
        report.performance,
        Some(&outcome.best_weights),
        runtime_ms,
    );
    let history = RunHistory { n_networks: n, mode: mode.to_string(), replication: rep, history: outcome.history.clone() };
    Ok((row, history))
}

fn split_runs(runs: Vec<(ReplicationRow, Option<RunHistory>)>) -> (Vec<ReplicationRow>, Vec<RunHistory>) {
    let mut rows = Vec::with_capacity(runs.len());
    let mut histories = Vec::new();
    for (row, history) in runs {
        rows.push(row);
        histories.extend(history);
    }
    (rows, histories)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exp1IncomeSummary {
    pub n_networks: usize,
    pub independent_income: f64,
    pub collaborative_income: f64,
    pub ratio: f64,
    /// Replications where collaborative income exceeded independent income.
    pub collaborative_wins: usize,
    pub replications: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exp1GaGspSummary {
    pub n_networks: usize,
    pub ga_fitness: f64,
    pub gsp_fitness: f64,
    /// Replications where the GA outscored GSP on the same visit stream.
    pub ga_wins: usize,
    pub replications: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exp2Summary {
    pub n_networks: usize,
    pub target_weight: usize,
    pub x2: f64,
    pub replications: usize,
    pub stats: SummaryStats,
    /// Weights of the fittest replication.
    pub best_weights: [f64; 6],
    pub mean_weights: [f64; 6],
    /// Replications whose optimized weights have the target as argmax.
    pub target_argmax_runs: usize,
    pub baseline: Option<Exp2Baseline>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exp2Baseline {
    pub x2: f64,
    pub stats: SummaryStats,
    pub mean_weights: [f64; 6],
    /// Paired replications where the target weight rose strictly over the baseline.
    pub target_increase_runs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    pub n_networks: usize,
    pub replications: usize,
    pub crossover_levels: Vec<f64>,
    pub mutation_levels: Vec<f64>,
    /// `matrix[i][j]` is the mean best fitness at `crossover_levels[i]`, `mutation_levels[j]`.
    pub matrix: Vec<Vec<f64>>,
    pub best_crossover: f64,
    pub best_mutation: f64,
    pub best_mean: f64,
    pub grand_mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "results", rename_all = "snake_case")]
pub enum Summary {
    Exp1Income(Vec<Exp1IncomeSummary>),
    Exp1GaVsGsp(Vec<Exp1GaGspSummary>),
    Exp2(Vec<Exp2Summary>),
    Grid(GridSummary),
}

/// Per-generation trace of one GA run inside an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunHistory {
    pub n_networks: usize,
    pub mode: String,
    pub replication: usize,
    pub history: Vec<GenerationStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOutput {
    pub experiment: ExperimentKind,
    pub rows: Vec<ReplicationRow>,
    pub summary: Summary,
    /// One entry per GA run, in row order. Empty for GSP-only experiments.
    pub histories: Vec<RunHistory>,
}

fn rows_where<'a>(rows: &'a [ReplicationRow], n: usize, mode: &'a str) -> impl Iterator<Item = &'a ReplicationRow> + 'a {
    rows.iter().filter(move |r| r.n_networks == n && r.mode == mode)
}

/// GSP income in both modes with penalties off, on paired worlds and visit streams.
pub fn run_exp1_income(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    spec.validate()?;
    let name = ExperimentKind::Exp1Gsp.as_str();
    let per_job = spec
        .jobs()
        .par_iter()
        .map(|&(n, rep)| {
            let world = spec.world(n, rep)?;
            let seed = spec.replication_seed(rep);
            let mut out = Vec::with_capacity(2);
            for mode in [SimulationMode::GspIndependent, SimulationMode::GspCollaborative] {
                let timer = Timer::start(spec.record_runtime);
                let config = SimulationConfig {
                    apply_penalties: false,
                    ..spec.simulation_config(mode, n)
                };
                let report = simulate(world.clone(), &config, seed)?;
                out.push(gsp_row(name, n, rep, &report, timer.ms()));
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<ReplicationRow> = per_job.into_iter().flatten().collect();

    let independent = SimulationMode::GspIndependent.as_str();
    let collaborative = SimulationMode::GspCollaborative.as_str();
    let summary = spec
        .network_counts
        .iter()
        .map(|&n| {
            let ind: Vec<f64> = rows_where(&rows, n, independent).map(|r| r.income).collect();
            let col: Vec<f64> = rows_where(&rows, n, collaborative).map(|r| r.income).collect();
            let (mi, mc) = (mean(&ind), mean(&col));
            Exp1IncomeSummary {
                n_networks: n,
                independent_income: mi,
                collaborative_income: mc,
                ratio: if mi > 0.0 { mc / mi } else { f64::NAN },
                collaborative_wins: ind.iter().zip(&col).filter(|(i, c)| c > i).count(),
                replications: ind.len(),
            }
        })
        .collect();
    Ok(ExperimentOutput {
        experiment: ExperimentKind::Exp1Gsp,
        rows,
        summary: Summary::Exp1Income(summary),
        histories: Vec::new(),
    })
}

/// GA-optimized ASF against penalized collaborative GSP, both scored on the GA's visit stream.
pub fn run_exp1_ga_vs_gsp(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    spec.validate()?;
    let name = ExperimentKind::Exp1GaVsGsp.as_str();
    let per_job = spec
        .jobs()
        .par_iter()
        .map(|&(n, rep)| {
            let world = spec.world(n, rep)?;
            let sim = spec.simulation_config(SimulationMode::Asf, n);
            let timer = Timer::start(spec.record_runtime);
            let outcome = ga::optimize(&world, &sim, &spec.ga_config(rep))?;
            let (ga, history) = ga_row(name, "ga", n, rep, &world, &sim, &outcome, timer.ms())?;
            let timer = Timer::start(spec.record_runtime);
            let gsp_config = spec.simulation_config(SimulationMode::GspCollaborative, n);
            let report = simulate(world, &gsp_config, outcome.evaluation_seed)?;
            Ok([(ga, Some(history)), (gsp_row(name, n, rep, &report, timer.ms()), None)])
        })
        .collect::<Result<Vec<_>>>()?;
    let (rows, histories) = split_runs(per_job.into_iter().flatten().collect());

    let gsp_mode = SimulationMode::GspCollaborative.as_str();
    let summary = spec
        .network_counts
        .iter()
        .map(|&n| {
            let ga: Vec<f64> = rows_where(&rows, n, "ga").map(|r| r.fitness).collect();
            let gsp: Vec<f64> = rows_where(&rows, n, gsp_mode).map(|r| r.fitness).collect();
            Exp1GaGspSummary {
                n_networks: n,
                ga_fitness: mean(&ga),
                gsp_fitness: mean(&gsp),
                ga_wins: ga.iter().zip(&gsp).filter(|(g, s)| g > s).count(),
                replications: ga.len(),
            }
        })
        .collect();
    Ok(ExperimentOutput {
        experiment: ExperimentKind::Exp1GaVsGsp,
        rows,
        summary: Summary::Exp1GaVsGsp(summary),
        histories,
    })
}

fn argmax(w: &[f64; 6]) -> usize {
    let mut best = 0;
    for i in 1..6 {
        if w[i] > w[best] {
            best = i;
        }
    }
    best
}

fn mean_weights(rows: &[&ReplicationRow]) -> [f64; 6] {
    let mut acc = [0.0; 6];
    for r in rows {
        if let Some(t) = r.thetas() {
            for (a, x) in acc.iter_mut().zip(t) {
                *a += x;
            }
        }
    }
    acc.map(|a| if rows.is_empty() { 0.0 } else { a / rows.len() as f64 })
}

/// GA under amplified spam coefficient x2, optionally paired with the unshifted baseline.
pub fn run_exp2(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    spec.validate()?;
    let name = ExperimentKind::Exp2Coeff.as_str();
    let amplified = PenaltyCoefficients { x2: spec.amplified_x2, ..spec.coefficients };
    let mut variants = vec![("ga", amplified)];
    if spec.exp2_baseline {
        variants.push(("ga_baseline", spec.coefficients));
    }
    let per_job = spec
        .jobs()
        .par_iter()
        .map(|&(n, rep)| {
            let world = spec.world(n, rep)?;
            variants
                .iter()
                .map(|&(mode, coefficients)| {
                    let sim = SimulationConfig { coefficients, ..spec.simulation_config(SimulationMode::Asf, n) };
                    let timer = Timer::start(spec.record_runtime);
                    let outcome = ga::optimize(&world, &sim, &spec.ga_config(rep))?;
                    ga_row(name, mode, n, rep, &world, &sim, &outcome, timer.ms()).map(|(r, h)| (r, Some(h)))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let (rows, histories) = split_runs(per_job.into_iter().flatten().collect());

    let target = spec.exp2_target.index();
    let summary = spec
        .network_counts
        .iter()
        .map(|&n| {
            let shifted: Vec<&ReplicationRow> = rows_where(&rows, n, "ga").collect();
            let fitness: Vec<f64> = shifted.iter().map(|r| r.fitness).collect();
            let best = shifted
                .iter()
                .fold(None::<&ReplicationRow>, |b, r| match b {
                    Some(b) if b.fitness >= r.fitness => Some(b),
                    _ => Some(r),
                })
                .and_then(|r| r.thetas())
                .unwrap_or([0.0; 6]);
            let baseline_rows: Vec<&ReplicationRow> = rows_where(&rows, n, "ga_baseline").collect();
            let baseline = (!baseline_rows.is_empty()).then(|| {
                let values: Vec<f64> = baseline_rows.iter().map(|r| r.fitness).collect();
                Exp2Baseline {
                    x2: spec.coefficients.x2,
                    stats: SummaryStats::from_values(&values).expect("non-empty"),
                    mean_weights: mean_weights(&baseline_rows),
                    target_increase_runs: shifted
                        .iter()
                        .zip(&baseline_rows)
                        .filter(|(s, b)| match (s.thetas(), b.thetas()) {
                            (Some(s), Some(b)) => s[target] > b[target],
                            _ => false,
                        })
                        .count(),
                }
            });
            Exp2Summary {
                n_networks: n,
                target_weight: target + 1,
                x2: spec.amplified_x2,
                replications: shifted.len(),
                stats: SummaryStats::from_values(&fitness).expect("at least one replication"),
                best_weights: best,
                mean_weights: mean_weights(&shifted),
                target_argmax_runs: shifted
                    .iter()
                    .filter(|r| r.thetas().is_some_and(|t| argmax(&t) == target))
                    .count(),
                baseline,
            }
        })
        .collect();
    Ok(ExperimentOutput { experiment: ExperimentKind::Exp2Coeff, rows, summary: Summary::Exp2(summary), histories })
}

pub fn grid_levels() -> Vec<f64> {
    (1..=10).map(|i| i as f64 / 10.0).collect()
}

pub fn grid_mode(crossover: f64, mutation: f64) -> String {
    format!("ga_cx{crossover:.1}_mut{mutation:.1}")
}

/// Mean GA fitness over every (crossover, mutation) pair in {0.1, ..., 1.0}, on the
/// first configured network count. Every cell sees the same replication seeds.
pub fn run_grid(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    spec.validate()?;
    let name = ExperimentKind::Grid.as_str();
    let n = spec.network_counts[0];
    let levels = grid_levels();
    let worlds = (0..spec.replications)
        .map(|rep| spec.world(n, rep))
        .collect::<Result<Vec<_>>>()?;
    let sim = spec.simulation_config(SimulationMode::Asf, n);

    let mut jobs = Vec::new();
    for &cx in &levels {
        for &mu in &levels {
            for rep in 0..spec.replications {
                jobs.push((cx, mu, rep));
            }
        }
    }
    let runs = jobs
        .par_iter()
        .map(|&(cx, mu, rep)| {
            let ga = GaConfig { crossover_prob: cx, mutation_prob: mu, ..spec.ga_config(rep) };
            let timer = Timer::start(spec.record_runtime);
            let outcome = ga::optimize(&worlds[rep], &sim, &ga)?;
            ga_row(name, &grid_mode(cx, mu), n, rep, &worlds[rep], &sim, &outcome, timer.ms()).map(|(r, h)| (r, Some(h)))
        })
        .collect::<Result<Vec<_>>>()?;
    let (rows, histories) = split_runs(runs);

    let matrix: Vec<Vec<f64>> = levels
        .iter()
        .map(|&cx| {
            levels
                .iter()
                .map(|&mu| {
                    let mode = grid_mode(cx, mu);
                    mean(&rows_where(&rows, n, &mode).map(|r| r.fitness).collect::<Vec<_>>())
                })
                .collect()
        })
        .collect();
    let (mut bi, mut bj) = (0, 0);
    for (i, row) in matrix.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v > matrix[bi][bj] {
                (bi, bj) = (i, j);
            }
        }
    }
    let cells: Vec<f64> = matrix.iter().flatten().copied().collect();
    let summary = GridSummary {
        n_networks: n,
        replications: spec.replications,
        crossover_levels: levels.clone(),
        mutation_levels: levels.clone(),
        best_crossover: levels[bi],
        best_mutation: levels[bj],
        best_mean: matrix[bi][bj],
        grand_mean: mean(&cells),
        matrix,
    };
    Ok(ExperimentOutput { experiment: ExperimentKind::Grid, rows, summary: Summary::Grid(summary), histories })
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    match spec.experiment {
        ExperimentKind::Exp1Gsp => run_exp1_income(spec),
        ExperimentKind::Exp1GaVsGsp => run_exp1_ga_vs_gsp(spec),
        ExperimentKind::Exp2Coeff => run_exp2(spec),
        ExperimentKind::Grid => run_grid(spec),
    }
}

#[derive(Serialize)]
struct Exp2Record {
    n_networks: usize,
    variant: &'static str,
    x2: f64,
    replications: usize,
    max: f64,
    mean: f64,
    min: f64,
    std_dev: f64,
    theta1: f64,
    theta2: f64,
    theta3: f64,
    theta4: f64,
    theta5: f64,
    theta6: f64,
    target_weight: usize,
    target_runs: usize,
}

impl Exp2Record {
    fn new(s: &Exp2Summary, variant: &'static str, x2: f64, stats: &SummaryStats, w: &[f64; 6], runs: usize) -> Self {
        Self {
            n_networks: s.n_networks,
            variant,
            x2,
            replications: s.replications,
            max: stats.max,
            mean: stats.mean,
            min: stats.min,
            std_dev: stats.std_dev,
            theta1: w[0],
            theta2: w[1],
            theta3: w[2],
            theta4: w[3],
            theta5: w[4],
            theta6: w[5],
            target_weight: s.target_weight,
            target_runs: runs,
        }
    }
}

#[derive(Serialize)]
struct GridCell {
    crossover_prob: f64,
    mutation_prob: f64,
    mean_fitness: f64,
}

/// Writes the per-replication rows and the summary into `dir`, returning the paths written.
///
/// CSV summaries: `exp2_coeff_summary.csv` lists the mean weights of each variant
/// (`target_runs` counts argmax runs for the shifted variant and paired increases for
/// the baseline); the grid writes its matrix in long form plus a one-line best cell.
pub fn write_outputs(output: &ExperimentOutput, format: ReportFormat, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let name = output.experiment.as_str();
    let ext = format.extension();
    let rows_path = dir.join(format!("{name}.{ext}"));
    emit_report(&output.rows, format, &rows_path)?;
    let mut written = vec![rows_path];

    let summary_path = dir.join(format!("{name}_summary.{ext}"));
    match (format, &output.summary) {
        (ReportFormat::Json, summary) => report::write_json(summary, &summary_path)?,
        (ReportFormat::Csv, Summary::Exp1Income(s)) => report::write_csv(
            s,
            &["n_networks", "independent_income", "collaborative_income", "ratio", "collaborative_wins", "replications"],
            &summary_path,
        )?,
        (ReportFormat::Csv, Summary::Exp1GaVsGsp(s)) => report::write_csv(
            s,
            &["n_networks", "ga_fitness", "gsp_fitness", "ga_wins", "replications"],
            &summary_path,
        )?,
        (ReportFormat::Csv, Summary::Exp2(s)) => {
            let mut records = Vec::new();
            for e in s {
                records.push(Exp2Record::new(e, "shifted", e.x2, &e.stats, &e.mean_weights, e.target_argmax_runs));
                if let Some(b) = &e.baseline {
                    records.push(Exp2Record::new(e, "baseline", b.x2, &b.stats, &b.mean_weights, b.target_increase_runs));
                }
            }
            report::write_csv(
                &records,
                &[
                    "n_networks",
                    "variant",
                    "x2",
                    "replications",
                    "max",
                    "mean",
                    "min",
                    "std_dev",
                    "theta1",
                    "theta2",
                    "theta3",
                    "theta4",
                    "theta5",
                    "theta6",
                    "target_weight",
                    "target_runs",
                ],
                &summary_path,
            )?
        }
        (ReportFormat::Csv, Summary::Grid(g)) => {
            let mut cells = Vec::new();
            for (i, &cx) in g.crossover_levels.iter().enumerate() {
                for (j, &mu) in g.mutation_levels.iter().enumerate() {
                    cells.push(GridCell { crossover_prob: cx, mutation_prob: mu, mean_fitness: g.matrix[i][j] });
                }
            }
            report::write_csv(&cells, &["crossover_prob", "mutation_prob", "mean_fitness"], &summary_path)?;
            let best_path = dir.join(format!("{name}_best.csv"));
            report::write_csv(
                &[(g.n_networks, g.best_crossover, g.best_mutation, g.best_mean, g.grand_mean)],
                &["n_networks", "crossover_prob", "mutation_prob", "mean_fitness", "grand_mean"],
                &best_path,
            )?;
            written.push(summary_path.clone());
            written.push(best_path);
            return Ok(written);
        }
    }
    written.push(summary_path);
    Ok(written)
}
