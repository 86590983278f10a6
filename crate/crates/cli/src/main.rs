//! `owlproofs` — build and grade EL proof-evaluation benchmarks.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 endpoint error.

use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod config;

#[derive(Parser)]
#[command(name = "owlproofs", version, about = "EL proof-evaluation pipeline")]
struct Cli {
    /// Global random seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker-thread cap for parallel stages (default: available cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Log level: error, warn, info, debug, trace.
    #[arg(long, global = true, default_value = "warn")]
    log_level: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ResponderArg {
    Gold,
    Empty,
    Corrupt,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExampleArg {
    Simp,
    Detail,
    None,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TaskArg {
    Standard,
    Incomplete,
}

#[derive(Subcommand)]
enum Command {
    /// Classify an ontology and emit its direct-subsumption taxonomy.
    Classify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Histogram of atomic distances over all entailed subsumptions.
    Distance {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Minimal justification for a goal axiom.
    Justify {
        #[arg(long = "in")]
        input: PathBuf,
        /// Goal axiom in compact DL syntax, e.g. "A SubClassOf B".
        #[arg(long)]
        goal: String,
        #[arg(long, default_value_t = 16)]
        max_count: usize,
        #[arg(long, default_value_t = 5000)]
        max_tests: usize,
    },
    /// Translate DL axiom lines to natural-language sentences, 1:1.
    Verbalize {
        /// Input file; stdin when omitted.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Optional label table (TSV: identifier<TAB>label).
        #[arg(long)]
        lexicon: Option<PathBuf>,
    },
    /// Build benchmark samples from an ontology.
    BuildDataset {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        /// TOML config file; flags below override it.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        quota: Option<usize>,
        /// Comma-separated ratios, e.g. "1:1,1:5,1:10,1:20".
        #[arg(long)]
        ratios: Option<String>,
        /// Distance range "LO:HI".
        #[arg(long)]
        distance_range: Option<String>,
        /// Comma-separated modes: standard, hard, natural_language,
        /// just_only, naming, incomplete.
        #[arg(long)]
        modes: Option<String>,
    },
    /// Send samples to a chat endpoint (or a built-in responder).
    Run {
        #[arg(long)]
        samples: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        endpoint: Option<String>,
        #[arg(long, default_value = "offline")]
        model: String,
        /// Offline response source standing in for the LLM.
        #[arg(long, conflicts_with = "endpoint")]
        responder: Option<ResponderArg>,
        #[arg(long)]
        prompt_config: Option<PathBuf>,
        /// Include the inference-rules block in the prompt.
        #[arg(long)]
        rules: bool,
        #[arg(long)]
        example: Option<ExampleArg>,
        #[arg(long)]
        task: Option<TaskArg>,
        /// Bounded in-flight requests.
        #[arg(long, default_value_t = 4)]
        parallel: usize,
    },
    /// Parse raw responses and report per-record format correctness.
    ParseResponse {
        #[arg(long)]
        responses: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = TaskArg::Standard)]
        task: TaskArg,
    },
    /// Score responses against samples; writes scores.jsonl, summary.tsv,
    /// groups.tsv and report.json into the output directory.
    Score {
        #[arg(long)]
        samples: PathBuf,
        #[arg(long)]
        responses: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-aggregate a score file into a grouped matrix.
    Report {
        #[arg(long)]
        scores: PathBuf,
        #[arg(long, default_value = "distance,jsize")]
        group_by: String,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Failures mapped to exit codes.
pub enum CliError {
    Data(String),
    Endpoint(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Data(_) => 2,
            CliError::Endpoint(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Data(m) | CliError::Endpoint(m) => m,
        }
    }
}

pub fn data_err(message: impl Into<String>) -> CliError {
    CliError::Data(message.into())
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            std::process::exit(code);
        }
    };

    env_logger::Builder::new().parse_filters(&cli.log_level).init();
    if let Some(threads) = cli.threads {
        if let Err(e) = owlproofs_core::exec::configure_threads(threads) {
            log::warn!("thread pool already configured: {e}");
        }
    }

    let outcome = commands::dispatch(cli.command, cli.seed);
    match outcome {
        Ok(()) => {}
        Err(err) => {
            eprintln!("error: {}", err.message());
            std::process::exit(err.code());
        }
    }
}
