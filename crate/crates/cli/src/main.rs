//! Command-line pipeline: each subcommand reads the previous stage's file and
//! writes its own, so any stage can be rerun or swapped for external output.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{ConfigFlags, RunConfig};

#[derive(Parser)]
#[command(name = "rumour-evidence", version, about = "Evidence retrieval and evaluation for rumour verification")]
struct Cli {
    #[command(flatten)]
    config: ConfigFlags,
    #[command(subcommand)]
    command: Command,
}

/// Where rumours come from: raw tweets or a thread corpus.
#[derive(Debug, Clone, Args)]
pub struct RumourInput {
    /// Tweets as JSON Lines (`id`, `text`, `created_at`, `event`, `author_handle`).
    #[arg(long, conflicts_with_all = ["corpus", "preprocessed"])]
    pub tweets: Option<PathBuf>,
    /// Thread corpus: a PHEME-style directory or a threads JSON Lines file.
    #[arg(long, conflicts_with = "preprocessed")]
    pub corpus: Option<PathBuf>,
    /// Output of `preprocess`.
    #[arg(long)]
    pub preprocessed: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Clean source tweets: URLs out, mentions to `user`, trailing hashtags aside.
    Preprocess {
        #[command(flatten)]
        input: RumourInput,
        /// Output file; a file in --output-dir when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render one search query per rumour; prints the strings without --out.
    BuildQueries {
        #[command(flatten)]
        input: RumourInput,
        /// Dependency parses in CoNLL-U, keyed by `# sent_id` = tweet id.
        #[arg(long)]
        parses: Option<PathBuf>,
        /// Extractor triples: id, subject, predicate, object per line.
        #[arg(long)]
        triples: Option<PathBuf>,
        /// Output file; a file in --output-dir when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run queries against the configured backend and fetch articles.
    Search {
        #[arg(long)]
        queries: PathBuf,
        /// Output file; a file in --output-dir when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score one strategy's evidence with the retrieval metrics.
    ScoreRetrieval {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        evidence: PathBuf,
        /// Output file; a file in --output-dir when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pick the top evidence sentences per rumour.
    SelectSentences {
        #[command(flatten)]
        input: RumourInput,
        #[arg(long)]
        evidence: PathBuf,
        /// Sentence triples: sentence, subject, predicate, object per line.
        #[arg(long)]
        sentence_triples: Option<PathBuf>,
        /// Output file; a file in --output-dir when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Join threads, articles and selected sentences into the dataset file.
    Assemble {
        #[arg(long)]
        corpus: PathBuf,
        /// One or more evidence files; the first file listing a thread sets its strategy.
        #[arg(long, num_args = 1.., required = true)]
        evidence: Vec<PathBuf>,
        #[arg(long)]
        sentence_triples: Option<PathBuf>,
        /// Output file; a file in --output-dir when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-event thread, label and article counts.
    Stats {
        #[arg(long, conflicts_with = "corpus", required_unless_present = "corpus")]
        dataset: Option<PathBuf>,
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Output file; a file in --output-dir when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Overlap between retrieved articles and URLs posted in the threads.
    Overlap {
        #[arg(long)]
        dataset: PathBuf,
        /// Shortened-to-expanded URL map, tab separated.
        #[arg(long)]
        expansions: Option<PathBuf>,
        /// Fetched reaction pages in the offline corpus format; decides emptiness.
        #[arg(long)]
        reaction_pages: Option<PathBuf>,
        /// Output file; a file in --output-dir when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Leave-one-event-out evaluation of baseline or external predictions.
    Evaluate {
        #[arg(long)]
        dataset: PathBuf,
        /// `baseline`, or a predictions JSON Lines file.
        #[arg(long, default_value = "baseline")]
        predictions: String,
        /// Baseline scenarios: rumour, evidence, rumour+evidence (repeatable).
        #[arg(long)]
        scenario: Vec<String>,
        /// Also write the baseline's per-pair predictions here.
        #[arg(long)]
        predictions_out: Option<PathBuf>,
        /// Output file; a file in --output-dir when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score several strategies' evidence and rank them under every metric.
    CompareStrategies {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, num_args = 2.., required = true)]
        evidence: Vec<PathBuf>,
        /// Output file; a file in --output-dir when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A failed run: bad configuration or input (exit 1) or a stage error (exit 2).
#[derive(Debug)]
pub enum Failure {
    Validation(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = RunConfig::from_flags(&cli.config).map_err(Failure::Validation)?;
    use commands as c;
    match cli.command {
        Command::Preprocess { input, out } => c::preprocess_stage(&cfg, &input, out.as_deref()),
        Command::BuildQueries { input, parses, triples, out } => {
            c::build_queries(&cfg, &input, parses.as_deref(), triples.as_deref(), out.as_deref())
        }
        Command::Search { queries, out } => c::search(&cfg, &queries, out.as_deref()),
        Command::ScoreRetrieval { corpus, evidence, out } => c::compare(&cfg, &corpus, &[evidence], out.as_deref(), "metrics.jsonl"),
        Command::SelectSentences {
            input,
            evidence,
            sentence_triples,
            out,
        } => c::select(&cfg, &input, &evidence, sentence_triples.as_deref(), out.as_deref()),
        Command::Assemble {
            corpus,
            evidence,
            sentence_triples,
            out,
        } => c::assemble(&cfg, &corpus, &evidence, sentence_triples.as_deref(), out.as_deref()),
        Command::Stats { dataset, corpus, out } => c::stats(&cfg, dataset.as_deref(), corpus.as_deref(), out.as_deref()),
        Command::Overlap {
            dataset,
            expansions,
            reaction_pages,
            out,
        } => c::overlap(&cfg, &dataset, expansions.as_deref(), reaction_pages.as_deref(), out.as_deref()),
        Command::Evaluate {
            dataset,
            predictions,
            scenario,
            predictions_out,
            out,
        } => c::evaluate(&cfg, &dataset, &predictions, &scenario, predictions_out.as_deref(), out.as_deref()),
        Command::CompareStrategies { corpus, evidence, out } => {
            c::compare(&cfg, &corpus, &evidence, out.as_deref(), "comparison.jsonl")
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
