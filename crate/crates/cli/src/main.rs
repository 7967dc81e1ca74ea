use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nsqpwd::commands::{cmd_lfm, cmd_qpft, cmd_verify, cmd_wd};
use nsqpwd::config::{parse_point, ModeName, Overrides, RunConfig};
use nsqpwd::formats::Format;
use nsqpwd::CliError;
use nsqpwd_core::Point2;

/// Quadratic-phase Wigner distributions of 2D signals.
#[derive(Parser)]
#[command(name = "nsqpwd", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Distribution slices at the configured points.
    Wd(Common),
    /// LFM detection run with a peak report.
    Lfm(Common),
    /// Property suite; exit status 1 if any check fails.
    Verify(Common),
    /// Forward or inverse transform of a stored field.
    Qpft(QpftArgs),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    mode: Option<ModeName>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "snr-db", allow_negative_numbers = true)]
    snr_db: Option<f64>,
    /// Slice point `x1,x2`; repeatable, replaces the config list.
    #[arg(long = "slice", value_parser = parse_point, allow_hyphen_values = true)]
    slices: Vec<Point2>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct QpftArgs {
    #[command(flatten)]
    common: Common,
    /// Field file (`.csv` or NSQW1 binary).
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    inverse: bool,
}

fn load(c: Common) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::load(&c.config)?;
    cfg.apply(Overrides {
        out: c.out,
        mode: c.mode,
        seed: c.seed,
        snr_db: c.snr_db,
        slices: c.slices,
        format: c.format,
    });
    Ok(cfg)
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.cmd {
        Cmd::Wd(c) => cmd_wd(&load(c)?),
        Cmd::Lfm(c) => cmd_lfm(&load(c)?),
        Cmd::Verify(c) => cmd_verify(&load(c)?),
        Cmd::Qpft(q) => {
            let (input, inverse) = (q.input, q.inverse);
            cmd_qpft(&load(q.common)?, input.as_deref(), inverse)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(report) => {
            print!("{report}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("nsqpwd: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
