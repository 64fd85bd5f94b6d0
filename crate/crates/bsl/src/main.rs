use bsl::{export, run_experiment_in, Command, ExperimentConfig, Format, HarnessError};
use clap::{Parser, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    Eigen,
    Exponents,
    Mode,
    Coupled,
    Admit,
    Simulate,
    Threshold,
    Scaling,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Eigen => Command::Eigen,
            Cmd::Exponents => Command::Exponents,
            Cmd::Mode => Command::Mode,
            Cmd::Coupled => Command::Coupled,
            Cmd::Admit => Command::Admit,
            Cmd::Simulate => Command::Simulate,
            Cmd::Threshold => Command::Threshold,
            Cmd::Scaling => Command::Scaling,
        }
    }
}

/// Boussinesq stability laboratory.
///
/// Exit codes: 0 success, 2 configuration error, 3 numerical failure,
/// 4 instability observed where stability was asserted.
#[derive(Debug, Parser)]
#[command(name = "bsl", version)]
struct Cli {
    #[arg(value_enum)]
    command: Cmd,
    /// TOML parameter file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `out` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; overrides `jobs` in the config (0 = all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Experiment seed; overrides `seed` in the config.
    #[arg(long)]
    seed: Option<u64>,
}

fn run(cli: Cli) -> Result<i32, HarnessError> {
    let mut cfg = ExperimentConfig::load(cli.command.into(), &cli.config)?;
    if let Some(o) = cli.out {
        cfg.out = o;
    }
    if let Some(j) = cli.jobs {
        cfg.jobs = j;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let result = run_experiment_in(&cfg, Some(&cfg.out))?;
    export(&result, Format::Csv, &cfg.out)?;
    let paths = export(&result, Format::Json, &cfg.out)?;
    for f in &result.failures {
        eprintln!("point {} failed: {}", f.index, f.error);
    }
    if result.instability_observed {
        eprintln!("instability observed");
    }
    println!(
        "{}: {} rows, {} failures -> {}",
        result.command,
        result.table.len(),
        result.failures.len(),
        paths.first().and_then(|p| p.parent()).unwrap_or(&cfg.out).display()
    );
    Ok(result.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
