use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use sparse_plan::harness::{self, load_scenario_params, SweepConfig};

/// Benchmark harness for the sparse planner and the lattice baseline.
#[derive(Parser)]
#[command(name = "sparse-plan", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate scenario files from a scenario family.
    Generate {
        /// Scenario parameters, or a sweep configuration with a `scenarios` section.
        #[arg(long)]
        config: PathBuf,
        /// Base seed for `seed_count` ranges.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every planner configuration on every scenario and write a CSV.
    Run {
        /// Sweep configuration.
        #[arg(long)]
        config: PathBuf,
        /// Directory of scenario files.
        #[arg(long)]
        scenarios: PathBuf,
        /// Output CSV.
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; scenarios are spread over them.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Record zero plan times so repeated runs are byte-identical.
        #[arg(long)]
        no_timing: bool,
    },
    /// Normalize a results CSV by a reference configuration.
    Summarize {
        /// Results CSV written by `run`.
        #[arg(long)]
        input: PathBuf,
        /// Reference configuration label or planner kind.
        #[arg(long)]
        reference: String,
        /// Summary JSON.
        #[arg(long)]
        out: PathBuf,
        /// Optional tab-separated plot table.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Compare the sparse planner with the complete-graph optimum.
    OracleCheck {
        /// Scenario parameters, or a sweep configuration with a `scenarios` section.
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Report JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Largest accepted cost difference.
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
    },
}

fn execute(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Generate { config, seed, out } => {
            let params = load_scenario_params(&config)?;
            let written = harness::cmd_generate(&params, seed, &out)?;
            println!("wrote {} scenarios to {}", written.len(), out.display());
        }
        Command::Run {
            config,
            scenarios,
            out,
            jobs,
            no_timing,
        } => {
            anyhow::ensure!(jobs >= 1, "--jobs must be at least 1");
            let sweep = SweepConfig::load(&config)?;
            let rows = harness::cmd_run(&scenarios, &sweep, &out, jobs, !no_timing)?;
            println!("wrote {} rows to {}", rows.len(), out.display());
        }
        Command::Summarize {
            input,
            reference,
            out,
            table,
        } => {
            let summary = harness::cmd_summarize(&input, &reference, &out, table.as_deref())?;
            for c in &summary.configs {
                match c.cost_ratio {
                    Some(r) => println!(
                        "{}: solved {}/{}, cost ratio median {:.4} [{:.4}, {:.4}]",
                        c.label, c.solved, c.runs, r.median, r.p2_5, r.p97_5
                    ),
                    None => println!("{}: solved {}/{}", c.label, c.solved, c.runs),
                }
            }
        }
        Command::OracleCheck {
            config,
            seed,
            out,
            jobs,
            tolerance,
        } => {
            anyhow::ensure!(jobs >= 1, "--jobs must be at least 1");
            let params = load_scenario_params(&config)?;
            let report = harness::oracle_check(&params, seed, tolerance, jobs)?;
            if let Some(path) = out {
                let json = serde_json::to_string_pretty(&report)?;
                std::fs::write(&path, json + "\n").with_context(|| format!("writing {}", path.display()))?;
            }
            println!(
                "{} scenarios, max cost discrepancy {:e}, {} above {:e}",
                report.cases.len(),
                report.max_discrepancy,
                report.mismatches,
                tolerance
            );
            return Ok(report.mismatches == 0);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let mut message = e.to_string();
            for cause in e.chain().skip(1) {
                let text = cause.to_string();
                if !message.contains(&text) {
                    message = format!("{message}: {text}");
                }
            }
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
