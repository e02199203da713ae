use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use groupoidal::report::digest;
use groupoidal::{parse_model, run_suite, RunOptions, Suite};

/// Build discrete groupoid models from JSON documents and check them.
#[derive(Parser)]
#[command(name = "groupoidal", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a model document against the schema.
    Validate {
        file: PathBuf,
        /// Print the canonical serialization instead of a summary.
        #[arg(long)]
        canonical: bool,
    },
    /// Run a check suite and print the report.
    Run {
        file: PathBuf,
        /// Suite to run; defaults to the document's `suites`, else `all`.
        #[arg(long, value_enum)]
        suite: Option<Suite>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Degree window `M`.
        #[arg(long)]
        window: Option<u32>,
        /// Tolerance for floating-point comparisons.
        #[arg(long)]
        tol: Option<f64>,
        /// Random samples per check.
        #[arg(long, default_value_t = groupoidal::suites::DEFAULT_BUDGET)]
        budget: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

const SCHEMA_ERROR: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { file, canonical } => {
            let Some((bytes, doc)) = load(&file) else {
                return ExitCode::from(SCHEMA_ERROR);
            };
            if canonical {
                print!("{}", doc.canonical());
            } else {
                println!(
                    "ok: {} groupoid, {} units, {} regime, {} elements, sha256 {}",
                    doc.groupoid.kind(),
                    doc.model().unit_count(),
                    doc.regime.name(),
                    doc.elements.len(),
                    digest(&bytes)
                );
            }
            ExitCode::SUCCESS
        }
        Command::Run { file, suite, seed, window, tol, budget, format } => {
            let Some((bytes, doc)) = load(&file) else {
                return ExitCode::from(SCHEMA_ERROR);
            };
            let suites = match suite {
                Some(s) => vec![s],
                None if doc.suites.is_empty() => vec![Suite::All],
                None => doc.suites.iter().filter_map(|s| Suite::from_name(s)).collect(),
            };
            let opts = RunOptions { seed, window, tolerance: tol, budget };
            let report = run_suite(&doc, &bytes, &suites, opts);
            match format {
                Format::Json => println!("{}", report.to_json()),
                Format::Text => print!("{}", report.to_text()),
            }
            ExitCode::from(report.exit_code())
        }
    }
}

fn load(file: &PathBuf) -> Option<(Vec<u8>, groupoidal::Document)> {
    let bytes = match std::fs::read(file) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("{}: {e}", file.display());
            return None;
        }
    };
    match parse_model(&bytes) {
        Ok(doc) => Some((bytes, doc)),
        Err(errors) => {
            for e in errors {
                eprintln!("schema error at {e}");
            }
            None
        }
    }
}
