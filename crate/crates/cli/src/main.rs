use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use weightlab::scenario::{
    load_scenario, run_scenario, run_suite, schema_text, RunOptions, ToleranceProfile,
};

/// Scenario runner for the weight-class calculus and compactness lab.
#[derive(Parser)]
#[command(name = "weightlab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ProfileArg {
    Strict,
    Default,
}

impl From<ProfileArg> for ToleranceProfile {
    fn from(p: ProfileArg) -> Self {
        match p {
            ProfileArg::Strict => ToleranceProfile::Strict,
            ProfileArg::Default => ToleranceProfile::Default,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a single scenario file and print its report.
    Run {
        file: PathBuf,
        /// Override the scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Directory for report and CSV files (default: $WEIGHTLAB_OUT_DIR).
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Worker threads for parallel sections.
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, value_enum, default_value = "default")]
        tolerance_profile: ProfileArg,
    },
    /// Run every scenario in a directory and write a CSV summary.
    Suite {
        dir: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, value_enum, default_value = "default")]
        tolerance_profile: ProfileArg,
    },
    /// Print the scenario schema and report formats.
    Schema,
}

fn default_out_dir(cli_value: Option<PathBuf>) -> Option<PathBuf> {
    cli_value.or_else(|| std::env::var_os("WEIGHTLAB_OUT_DIR").map(PathBuf::from))
}

fn configure_jobs(jobs: Option<usize>) -> anyhow::Result<()> {
    if let Some(n) = jobs {
        weightlab::scenario::configure_workers(n).context("configuring worker pool")?;
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run() -> anyhow::Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { file, seed, out_dir, jobs, tolerance_profile } => {
            configure_jobs(jobs)?;
            let opts = RunOptions {
                out_dir: default_out_dir(out_dir),
                tolerance_profile: tolerance_profile.into(),
                seed_override: seed,
            };
            let scenario =
                load_scenario(&file).with_context(|| format!("loading {}", file.display()))?;
            let report = run_scenario(&scenario, &opts)
                .with_context(|| format!("running {}", scenario.name))?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Suite { dir, seed, out_dir, jobs, tolerance_profile } => {
            configure_jobs(jobs)?;
            let opts = RunOptions {
                out_dir: default_out_dir(out_dir),
                tolerance_profile: tolerance_profile.into(),
                seed_override: seed,
            };
            let (rows, all_passed) = run_suite(&dir, &opts)?;
            for row in &rows {
                println!("{}\t{}\t{}", row.file, row.name, row.status);
            }
            println!("{} scenario(s), all passed: {all_passed}", rows.len());
            Ok(if all_passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Schema => {
            print!("{}", schema_text());
            Ok(ExitCode::SUCCESS)
        }
    }
}
