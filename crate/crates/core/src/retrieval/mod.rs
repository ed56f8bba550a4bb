//! Search backends, page extraction and the top-N non-empty collection rule.

mod article;
mod backend;
mod live;
mod offline;

use thiserror::Error;

pub use article::{extract_article, extract_article_at, ArticleDoc};
pub use backend::{search, BackendDescriptor, SearchBackend, SearchResult, MAX_SEARCH_DEPTH};
pub use live::{LiveBackend, LiveConfig};
pub use offline::{analyze, CorpusDocument, OfflineBackend, OfflineCorpusIndex, Posting, BM25_B, BM25_K1};

#[derive(Debug, Error)]
pub enum RetrievalError {
    #[error("backend {backend} unavailable: {reason}")]
    BackendUnavailable { backend: String, reason: String },
    #[error("backend {backend} quota exceeded")]
    QuotaExceeded { backend: String },
    #[error("offline corpus line {line}: {reason}")]
    Corpus { line: usize, reason: String },
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("backend configuration: {0}")]
    Config(String),
}
