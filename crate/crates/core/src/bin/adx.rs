//! Command-line front end. Exit codes: 0 success, 2 configuration error, 3 runtime failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use adexchange::experiments::config::ConfigFile;
use adexchange::experiments::{
    emit_history, emit_report, run_experiment, write_outputs, Exp2Target, ExperimentKind, ExperimentSpec,
    ReplicationRow, ReportFormat, Summary,
};
use adexchange::ga;
use adexchange::selection::WeightVector;
use adexchange::simulation::{self, SimulationConfig, SimulationMode};
use adexchange::Error;

#[derive(Parser)]
#[command(name = "adx", version, about = "Ad-exchange simulator and experiment harness")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// TOML file with experiment settings; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Full-size visits, population and generations.
    #[arg(long, global = true, conflicts_with = "scale")]
    paper_scale: bool,
    #[arg(long, global = true)]
    scale: Option<f64>,
    #[arg(long, global = true)]
    replications: Option<usize>,
    /// Comma-separated network counts, e.g. 10,20,30.
    #[arg(long, global = true, value_delimiter = ',')]
    networks: Option<Vec<usize>>,
    /// Record wall-clock runtime_ms; output is then no longer byte-reproducible.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Asf,
    GspCollaborative,
    GspIndependent,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Theta3,
    Theta2,
}

#[derive(Subcommand)]
enum Command {
    /// One simulation on the first network count.
    Simulate {
        #[arg(long, value_enum, default_value = "gsp-collaborative")]
        mode: Mode,
        /// Six comma-separated ASF weights summing to 1.
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<f64>>,
        #[arg(long)]
        no_penalties: bool,
    },
    /// One GA run on the first network count.
    Optimize,
    /// Independent vs collaborative GSP income.
    #[command(name = "exp1-income")]
    Exp1Income,
    /// GA-optimized ASF vs penalized collaborative GSP.
    #[command(name = "exp1-ga-gsp")]
    Exp1GaGsp,
    /// GA with the spam penalty coefficient raised.
    Exp2 {
        #[arg(long, value_enum)]
        target: Option<Target>,
        #[arg(long)]
        x2: Option<f64>,
    },
    /// Crossover by mutation probability grid.
    Grid,
}

fn build_spec(kind: ExperimentKind, g: &Global) -> adexchange::Result<ExperimentSpec> {
    let mut spec = ExperimentSpec::new(kind);
    if let Some(path) = &g.config {
        ConfigFile::load(path)
            .map_err(|e| if e.is_config_error() { e } else { Error::Config(format!("{}: {e}", path.display())) })?
            .apply(&mut spec);
    }
    if let Some(s) = g.seed {
        spec.seed = s;
    }
    if let Some(o) = &g.out {
        spec.out_dir = o.clone();
    }
    if let Some(f) = g.format {
        spec.format = match f {
            Format::Csv => ReportFormat::Csv,
            Format::Json => ReportFormat::Json,
        };
    }
    if g.paper_scale {
        spec.scale_factor = 1.0;
    }
    if let Some(s) = g.scale {
        spec.scale_factor = s;
    }
    if let Some(r) = g.replications {
        spec.replications = r;
    }
    if let Some(n) = &g.networks {
        spec.network_counts = n.clone();
    }
    if g.timing {
        spec.record_runtime = true;
    }
    spec.validate()?;
    Ok(spec)
}

fn print_summary(summary: &Summary) {
    match summary {
        Summary::Exp1Income(rows) => {
            for r in rows {
                println!(
                    "networks {:>3}  independent {:>12.2}  collaborative {:>12.2}  ratio {:.3}  wins {}/{}",
                    r.n_networks, r.independent_income, r.collaborative_income, r.ratio, r.collaborative_wins, r.replications
                );
            }
        }
        Summary::Exp1GaVsGsp(rows) => {
            for r in rows {
                println!(
                    "networks {:>3}  ga {:>12.2}  gsp {:>12.2}  ga wins {}/{}",
                    r.n_networks, r.ga_fitness, r.gsp_fitness, r.ga_wins, r.replications
                );
            }
        }
        Summary::Exp2(rows) => {
            for r in rows {
                println!(
                    "networks {:>3}  x2 {}  mean {:.2}  max {:.2}  min {:.2}  std {:.2}  weights {:.3?}  theta{} argmax {}/{}",
                    r.n_networks,
                    r.x2,
                    r.stats.mean,
                    r.stats.max,
                    r.stats.min,
                    r.stats.std_dev,
                    r.mean_weights,
                    r.target_weight,
                    r.target_argmax_runs,
                    r.replications
                );
                if let Some(b) = &r.baseline {
                    println!(
                        "              x2 {}  mean {:.2}  weights {:.3?}  theta{} increased {}/{}",
                        b.x2, b.stats.mean, b.mean_weights, r.target_weight, b.target_increase_runs, r.replications
                    );
                }
            }
        }
        Summary::Grid(g) => {
            println!(
                "networks {}  best crossover {:.1} mutation {:.1}  mean {:.2}  grand mean {:.2}",
                g.n_networks, g.best_crossover, g.best_mutation, g.best_mean, g.grand_mean
            );
        }
    }
}

fn run(cli: Cli) -> adexchange::Result<()> {
    let g = &cli.global;
    match cli.command {
        Command::Simulate { mode, weights, no_penalties } => {
            let spec = build_spec(ExperimentKind::Exp1Gsp, g)?;
            let n = spec.network_counts[0];
            let mode = match mode {
                Mode::Asf => SimulationMode::Asf,
                Mode::GspCollaborative => SimulationMode::GspCollaborative,
                Mode::GspIndependent => SimulationMode::GspIndependent,
            };
            let weights = weights
                .map(|w| {
                    let arr: [f64; 6] = w
                        .try_into()
                        .map_err(|_| Error::Config("--weights needs exactly six values".into()))?;
                    WeightVector::new(arr)
                })
                .transpose()?;
            let config = SimulationConfig {
                weights,
                apply_penalties: !no_penalties,
                ..spec.simulation_config(mode, n)
            };
            let report = simulation::simulate(spec.world(n, 0)?, &config, spec.replication_seed(0))?;
            std::fs::create_dir_all(&spec.out_dir)?;
            let path = spec.out_dir.join(format!("simulate.{}", spec.format.extension()));
            match spec.format {
                ReportFormat::Json => std::fs::write(&path, report.to_json()? + "\n")?,
                ReportFormat::Csv => {
                    let row = ReplicationRow::new(
                        "simulate",
                        n,
                        mode.as_str(),
                        report.seed,
                        0,
                        report.income,
                        &report.penalties,
                        report.performance,
                        config.weights.as_ref(),
                        0,
                    );
                    emit_report(&[row], ReportFormat::Csv, &path)?;
                }
            }
            println!(
                "{} visits {} clicks {} income {:.2} penalties {:.2} performance {:.2} -> {}",
                mode.as_str(),
                report.visits,
                report.clicks,
                report.income,
                report.penalties.total(),
                report.performance,
                path.display()
            );
        }
        Command::Optimize => {
            let spec = build_spec(ExperimentKind::Exp1GaVsGsp, g)?;
            let n = spec.network_counts[0];
            let outcome = ga::optimize(
                &spec.world(n, 0)?,
                &spec.simulation_config(SimulationMode::Asf, n),
                &spec.ga_config(0),
            )?;
            std::fs::create_dir_all(&spec.out_dir)?;
            let path = spec.out_dir.join(format!("optimize_history.{}", spec.format.extension()));
            emit_history(&outcome.history, spec.format, &path)?;
            println!(
                "best fitness {:.2} weights {:.4?} after {} evaluations -> {}",
                outcome.best_fitness,
                outcome.best_weights.as_array(),
                outcome.evaluations,
                path.display()
            );
        }
        Command::Exp1Income | Command::Exp1GaGsp | Command::Exp2 { .. } | Command::Grid => {
            let kind = match cli.command {
                Command::Exp1Income => ExperimentKind::Exp1Gsp,
                Command::Exp1GaGsp => ExperimentKind::Exp1GaVsGsp,
                Command::Exp2 { .. } => ExperimentKind::Exp2Coeff,
                _ => ExperimentKind::Grid,
            };
            let mut spec = build_spec(kind, g)?;
            if let Command::Exp2 { target, x2 } = cli.command {
                if let Some(t) = target {
                    spec.exp2_target = match t {
                        Target::Theta3 => Exp2Target::Theta3,
                        Target::Theta2 => Exp2Target::Theta2,
                    };
                }
                if let Some(x2) = x2 {
                    spec.amplified_x2 = x2;
                }
                spec.validate()?;
            }
            let output = run_experiment(&spec)?;
            print_summary(&output.summary);
            for path in write_outputs(&output, spec.format, &spec.out_dir)? {
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config_error() { 2 } else { 3 })
        }
    }
}
