//! Rumour corpus loading, evidence joining, statistics and overlap analysis.

mod assemble;
mod corpus;
mod overlap;
mod stats;
mod urls;

use thiserror::Error;

pub use assemble::{
    assemble, read_dataset, write_dataset, AssemblyConfig, AssemblyReport, EnrichedEntry, EntryStatus, ThreadEvidence,
    DATASET_KIND, MAX_ARTICLES,
};
pub use corpus::{load_corpus, load_pheme, parse_twitter_date, ThreadEntry, THREADS_KIND};
pub use overlap::{overlap_report, OverlapCounts, OverlapReport};
pub use stats::{CorpusStats, EventStats};
pub use urls::{normalize_url, UrlCanonicalizer};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("thread {thread_id}: no veracity annotation")]
    MissingAnnotation { thread_id: String },
    #[error("thread {thread_id}: annotation marks the rumour both true and false")]
    ConflictingAnnotation { thread_id: String },
    #[error("{file}: malformed tweet: {reason}")]
    MalformedTweet { file: String, reason: String },
    #[error("cannot parse url {0}")]
    UnparseableUrl(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Jsonl(#[from] crate::jsonl::JsonlError),
    #[error("no recognisable event folders under {0}")]
    NoEvents(String),
    #[error("expansion map line {line}: {reason}")]
    MalformedExpansion { line: usize, reason: String },
}
