use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bloch_wco::{ScalarMap, SupConfig};
use bloch_wco_cli::{run_analyze, run_fields, run_paper_suite, seed_from_env, AnalysisConfig, CliError, SuiteOptions};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bloch-wco", version, about = "Weighted composition operators on Bloch spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks listed in a JSON config and emit a JSON report.
    Analyze {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Export pointwise criterion fields on a grid as CSV.
    Fields {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        grid: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the built-in example fixtures.
    PaperSuite {
        /// Only fixtures whose name contains this string.
        #[arg(long)]
        filter: Option<String>,
        /// Innermost-shell tolerance for the little-Bloch fixtures.
        #[arg(long, default_value_t = bloch_wco::bloch::TOL_DECAY)]
        tol_decay: f64,
    },
    /// Parse an expression and print its canonical form.
    ParseCheck {
        #[arg(long, allow_hyphen_values = true)]
        expr: String,
        #[arg(long)]
        dim: usize,
    },
}

fn write_to(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    let res = match path {
        Some(p) => std::fs::write(p, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    };
    res.map_err(|e| CliError::Engine(format!("cannot write output: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze { config, out, seed } => {
            let cfg = AnalysisConfig::load(&config)?;
            let seed = seed_from_env(seed, cfg.sup.seed)?;
            let report = run_analyze(&cfg, seed)?;
            write_to(out.as_deref(), &report.to_json())
        }
        Command::Fields { config, grid, out } => {
            let cfg = AnalysisConfig::load(&config)?;
            let pair = cfg.pair()?;
            let file = File::create(&out)
                .map_err(|e| CliError::Config(format!("cannot create {}: {e}", out.display())))?;
            let rows = run_fields(&pair, grid, BufWriter::new(file))?;
            eprintln!("wrote {rows} rows to {}", out.display());
            Ok(())
        }
        Command::PaperSuite { filter, tol_decay } => {
            let cfg = SupConfig::default().with_seed(seed_from_env(None, None)?);
            let outcome = run_paper_suite(filter.as_deref(), &SuiteOptions { tol_decay }, &cfg)?;
            write_to(None, &outcome.table)?;
            if outcome.all_pass() {
                Ok(())
            } else {
                Err(CliError::Mismatch(format!("failing fixtures: {}", outcome.failed_fixtures.join(", "))))
            }
        }
        Command::ParseCheck { expr, dim } => {
            if dim == 0 {
                return Err(CliError::Config("dim must be at least 1".into()));
            }
            let f = ScalarMap::parse(&expr, dim).map_err(|e| CliError::Config(e.to_string()))?;
            write_to(None, &format!("{}\n", f.expr()))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
