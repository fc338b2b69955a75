//! `ncfa`: verification, extremizer search and reporting for 2-box models.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ncfa_core::Sector;

use commands::{Global, Outcome, SearchOpts};
use config::{CliError, GridArgs};
use output::Format;

#[derive(Debug, Parser)]
#[command(name = "ncfa", version, about = "Fourier analysis on finite-dimensional 2-box models")]
struct Cli {
    /// Model: `cyclic:N`, `abelian:2x3`, `s3`, `nonabelian:<table.json>`, `tl:<delta>`, or a .toml/.json model document.
    #[arg(long, global = true, default_value = "cyclic:4")]
    model: String,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Relative tolerance override for pass/fail decisions.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true, env = "NCFA_JOBS", default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SectorArg {
    Plus,
    Minus,
}

#[derive(Debug, clap::Args)]
struct SearchArgs {
    #[arg(long, default_value_t = 50)]
    restarts: usize,
    #[arg(long, default_value_t = 2000)]
    max_iters: usize,
    /// Sector holding the source element.
    #[arg(long, value_enum, default_value = "plus")]
    sector: SectorArg,
    /// Skip structured family candidates.
    #[arg(long)]
    no_candidates: bool,
}

impl SearchArgs {
    fn opts(&self) -> SearchOpts {
        SearchOpts {
            restarts: self.restarts,
            max_iters: self.max_iters,
            sector: match self.sector {
                SectorArg::Plus => Sector::Plus,
                SectorArg::Minus => Sector::Minus,
            },
            no_candidates: self.no_candidates,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run inequality checkers over structured candidates and random samples.
    Verify {
        /// Comma-separated subset of plancherel, hy, holder, young, norm_bounds, ds, hb, up1, up2,
        /// norm1 (alias lemma37), entropy_monotone (alias lemma43).
        #[arg(long, default_value = "plancherel,hy,holder,young,norm_bounds,ds,hb,up1,up2,norm1,entropy_monotone")]
        checks: String,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Estimate the transform norm over a (1/p, 1/q) grid.
    Sweep {
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Estimate the transform norm at one exponent pair.
    Search {
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
        #[command(flatten)]
        search: SearchArgs,
        /// Write the best element as JSON.
        #[arg(long)]
        save_element: Option<PathBuf>,
    },
    /// Classify an element read from a JSON document.
    Classify {
        #[arg(long)]
        element: PathBuf,
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
    },
    /// Map the minimum slack of the second entropic principle.
    Anomaly {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Check the transform axioms of a model on random samples.
    ValidateModel {
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
}

fn positive(name: &str, v: usize) -> Result<(), CliError> {
    if v == 0 {
        return Err(CliError::config(format!("{name} must be at least 1")));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    if let Some(t) = cli.tol {
        if !(t.is_finite() && t >= 0.0) {
            return Err(CliError::config("--tol must be finite and non-negative"));
        }
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build_global()
        .map_err(|e| CliError::config(format!("--jobs: {e}")))?;
    let g = Global { model: cli.model, seed: cli.seed, tol: cli.tol, out: cli.out, format: cli.format };
    match cli.command {
        Command::Verify { checks, samples, grid } => {
            positive("--samples", samples)?;
            commands::verify(&g, &checks, samples, &grid)
        }
        Command::Sweep { grid, search } => commands::sweep(&g, &grid, &search.opts()),
        Command::Search { p, q, search, save_element } => commands::search(&g, &p, &q, &search.opts(), save_element.as_ref()),
        Command::Classify { element, p, q } => commands::classify_cmd(&g, &element, &p, &q),
        Command::Anomaly { grid, samples } => {
            positive("--samples", samples)?;
            commands::anomaly(&g, &grid, samples)
        }
        Command::ValidateModel { samples } => {
            positive("--samples", samples)?;
            commands::validate(&g, samples)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Violation) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
