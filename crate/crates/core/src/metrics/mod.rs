//! Retrieval-quality metrics: URL words, paragraph embeddings and an
//! external pairwise scorer.

mod compare;
mod embedding;
mod paragraph;
mod scorer;
mod url_words;

use thiserror::Error;

pub use compare::{compare_strategies, MetricComparison, MetricKind, MetricReport, RetrievedItem, StrategyRun};
pub use embedding::{cosine, EmbeddingError, EmbeddingStore};
pub use paragraph::{external_score, paragraph_score, scoring_units, MAX_UNITS};
pub use scorer::{LineScorer, PairScorer, ProcessScorer, SocketScorer};
pub use url_words::{url_words, url_words_score, url_words_with, UrlWordsScore};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("cannot parse url {0}")]
    UnparseableUrl(String),
    #[error("no article/response url pair has in-vocabulary words")]
    NoScorablePairs,
    #[error("no in-vocabulary words to compare")]
    NoKnownWords,
    #[error("external scorer unavailable: {0}")]
    ScorerUnavailable(String),
}

/// Mean whose value does not depend on input order.
pub(crate) fn order_free_mean(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    Some(values.iter().sum::<f64>() / values.len() as f64)
}
