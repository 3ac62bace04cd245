//! Per-replication rows and their CSV/JSON encodings.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::accounting::PenaltyBreakdown;
use crate::error::{Error, Result};
use crate::ga::GenerationStats;
use crate::selection::WeightVector;

/// Column order of every per-replication CSV.
pub const COLUMNS: [&str; 19] = [
    "experiment",
    "n_networks",
    "mode",
    "seed",
    "replication",
    "income",
    "pen1",
    "pen2",
    "pen3",
    "pen4",
    "pen5",
    "fitness",
    "theta1",
    "theta2",
    "theta3",
    "theta4",
    "theta5",
    "theta6",
    "runtime_ms",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
        }
    }
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::config(format!("unknown format {other:?}, expected csv or json"))),
        }
    }
}

/// One simulation or GA run. GSP rows leave the theta columns empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRow {
    pub experiment: String,
    pub n_networks: usize,
    pub mode: String,
    pub seed: u64,
    pub replication: usize,
    pub income: f64,
    pub pen1: f64,
    pub pen2: f64,
    pub pen3: f64,
    pub pen4: f64,
    pub pen5: f64,
    pub fitness: f64,
    pub theta1: Option<f64>,
    pub theta2: Option<f64>,
    pub theta3: Option<f64>,
    pub theta4: Option<f64>,
    pub theta5: Option<f64>,
    pub theta6: Option<f64>,
    pub runtime_ms: u64,
}

impl ReplicationRow {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        experiment: &str,
        n_networks: usize,
        mode: &str,
        seed: u64,
        replication: usize,
        income: f64,
        penalties: &PenaltyBreakdown,
        fitness: f64,
        weights: Option<&WeightVector>,
        runtime_ms: u64,
    ) -> Self {
        let [pen1, pen2, pen3, pen4, pen5] = penalties.amounts();
        let theta = weights.map(|w| w.as_array());
        let t = |i: usize| theta.map(|a| a[i]);
        Self {
            experiment: experiment.to_string(),
            n_networks,
            mode: mode.to_string(),
            seed,
            replication,
            income,
            pen1,
            pen2,
            pen3,
            pen4,
            pen5,
            fitness,
            theta1: t(0),
            theta2: t(1),
            theta3: t(2),
            theta4: t(3),
            theta5: t(4),
            theta6: t(5),
            runtime_ms,
        }
    }

    pub fn thetas(&self) -> Option<[f64; 6]> {
        Some([self.theta1?, self.theta2?, self.theta3?, self.theta4?, self.theta5?, self.theta6?])
    }
}

/// Writes `rows` to `path`. CSV gets a header even when `rows` is empty.
pub fn emit_report(rows: &[ReplicationRow], format: ReportFormat, path: &Path) -> Result<()> {
    match format {
        ReportFormat::Csv => write_csv(rows, &COLUMNS, path)?,
        ReportFormat::Json => write_json(rows, path)?,
    }
    Ok(())
}

pub fn read_rows(format: ReportFormat, path: &Path) -> Result<Vec<ReplicationRow>> {
    match format {
        ReportFormat::Csv => {
            let mut r = csv::Reader::from_path(path)?;
            r.deserialize().map(|row| row.map_err(Error::from)).collect()
        }
        ReportFormat::Json => Ok(serde_json::from_reader(File::open(path)?)?),
    }
}

#[derive(Serialize)]
struct HistoryRecord {
    generation: usize,
    best_fitness: f64,
    mean_fitness: f64,
    theta1: f64,
    theta2: f64,
    theta3: f64,
    theta4: f64,
    theta5: f64,
    theta6: f64,
}

/// Writes a GA run's per-generation best and mean fitness with the best weights.
pub fn emit_history(history: &[GenerationStats], format: ReportFormat, path: &Path) -> Result<()> {
    match format {
        ReportFormat::Json => write_json(history, path),
        ReportFormat::Csv => {
            let records: Vec<HistoryRecord> = history
                .iter()
                .map(|g| {
                    let [theta1, theta2, theta3, theta4, theta5, theta6] = g.best_weights;
                    HistoryRecord {
                        generation: g.generation,
                        best_fitness: g.best_fitness,
                        mean_fitness: g.mean_fitness,
                        theta1,
                        theta2,
                        theta3,
                        theta4,
                        theta5,
                        theta6,
                    }
                })
                .collect();
            write_csv(
                &records,
                &["generation", "best_fitness", "mean_fitness", "theta1", "theta2", "theta3", "theta4", "theta5", "theta6"],
                path,
            )
        }
    }
}

pub(crate) fn write_json<T: Serialize + ?Sized>(value: &T, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Writes any serializable records as CSV with a header row.
pub(crate) fn write_csv<T: Serialize>(records: &[T], header: &[&str], path: &Path) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    w.write_record(header)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
