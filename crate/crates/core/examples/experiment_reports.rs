//! Runs a small replicated experiment and writes its CSV reports.
//!
//! cargo run --release --example experiment_reports -- [out_dir]

use std::path::PathBuf;

use adexchange::experiments::{run_exp1_income, write_outputs, ExperimentKind, ExperimentSpec, ReportFormat, Summary};

fn main() -> adexchange::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("adx-reports"));
    let spec = ExperimentSpec {
        network_counts: vec![2, 4],
        replications: 5,
        scale_factor: 0.25,
        seed: 7,
        ..ExperimentSpec::new(ExperimentKind::Exp1Gsp)
    };
    let output = run_exp1_income(&spec)?;
    if let Summary::Exp1Income(rows) = &output.summary {
        for r in rows {
            println!("{} networks: ratio {:.2} ({} of {} replications favour collaboration)", r.n_networks, r.ratio, r.collaborative_wins, r.replications);
        }
    }
    for path in write_outputs(&output, ReportFormat::Csv, &out)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
