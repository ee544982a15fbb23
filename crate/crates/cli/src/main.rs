use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;

use critorbit::{Error, Result};
use critorbit_cli::commands::{self, to_json};
use critorbit_cli::config::Config;

#[derive(Parser, Debug)]
#[command(name = "critorbit", version, about = "Critical-orbit curves of the marked cubic family")]
struct Cli {
    /// Seed for the monodromy base point.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Residual tolerance for fiber roots during tracking.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Largest period accepted.
    #[arg(long, global = true)]
    budget: Option<u32>,
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// `key = value` file applied before the flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Add wall-clock timings to reports (breaks byte reproducibility).
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the exact-period polynomial and verify the product identity.
    Curve { n: u32 },
    /// Monodromy group, orbit count and involution on one fiber.
    Components { n: u32 },
    /// Escape regions at infinity with kneading words and flip paths.
    Atlas {
        n: u32,
        /// Circle radius; defaults to a multiple of the branch-point extent.
        #[arg(long)]
        radius: Option<f64>,
    },
    /// Transition matrices of every cyclic block partition.
    Thurston { n: u32 },
    /// Kneading words over one parameter `a` (`re` or `re,im`).
    Kneading {
        n: u32,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        /// Single `v`; by default every root of the fiber over `a`.
        #[arg(long, allow_hyphen_values = true)]
        v: Option<String>,
    },
    /// All pipelines plus CSV plot tables.
    Report {
        n: u32,
        #[arg(long, default_value = "critorbit-report")]
        out: PathBuf,
    },
}

fn parse_complex(text: &str) -> Result<Complex64> {
    let bad = || Error::Parse(format!("expected `re` or `re,im`, got {text:?}"));
    let mut parts = text.split(',').map(|t| t.trim().parse::<f64>().map_err(|_| bad()));
    let re = parts.next().ok_or_else(bad)??;
    let im = parts.next().transpose()?.unwrap_or(0.0);
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

fn config(cli: &Cli) -> Result<Config> {
    let mut cfg = Config::default();
    if let Some(path) = &cli.config {
        cfg.apply_file(path)?;
    }
    if let Some(seed) = cli.seed {
        cfg.atlas.monodromy.seed = seed;
    }
    if let Some(tol) = cli.tol {
        cfg.atlas.monodromy.track.residual_tol = tol;
    }
    if let Some(budget) = cli.budget {
        cfg.budget = budget;
    }
    if let Some(dir) = &cli.cache_dir {
        cfg.cache_dir = Some(dir.clone());
    }
    cfg.timings |= cli.timings;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<String> {
    let mut cfg = config(cli)?;
    match &cli.command {
        Command::Curve { n } => to_json(&commands::cmd_curve(*n, &cfg)?),
        Command::Components { n } => to_json(&commands::cmd_components(*n, &cfg)?),
        Command::Atlas { n, radius } => {
            if radius.is_some() {
                cfg.atlas.radius = *radius;
            }
            to_json(&commands::cmd_atlas(*n, &cfg)?)
        }
        Command::Thurston { n } => to_json(&commands::cmd_thurston(*n)?),
        Command::Kneading { n, a, v } => {
            let a = parse_complex(a)?;
            let v = v.as_deref().map(parse_complex).transpose()?;
            to_json(&commands::cmd_kneading(*n, a, v, &cfg)?)
        }
        Command::Report { n, out } => to_json(&commands::cmd_report(*n, &cfg, out)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
