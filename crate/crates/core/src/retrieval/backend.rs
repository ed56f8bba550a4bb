use log::warn;
use serde::{Deserialize, Serialize};

use super::{ArticleDoc, RetrievalError};
use crate::query::Query;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BackendDescriptor {
    pub name: String,
    /// When true the backend never returns documents dated on or after the
    /// query's cutoff.
    pub supports_date_filter: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResult {
    pub url: String,
    /// 1-based, contiguous per query.
    pub rank: usize,
    pub backend_name: String,
}

pub trait SearchBackend: Send + Sync {
    fn descriptor(&self) -> &BackendDescriptor;

    /// Results at ranks `start .. start + count` (1-based). Fewer than `count`
    /// results means the ranking is exhausted.
    fn results(&self, query: &Query, start: usize, count: usize) -> Result<Vec<SearchResult>, RetrievalError>;

    /// Fetches and extracts the page behind a result.
    fn fetch(&self, hit: &SearchResult) -> Result<ArticleDoc, RetrievalError>;
}

/// Deepest rank `search` will request before giving up.
pub const MAX_SEARCH_DEPTH: usize = 100;

/// Collects up to `want` non-empty articles in rank order, paging deeper while
/// empty pages are skipped. Pages that fail to fetch count as empty; quota
/// errors abort.
pub fn search(query: &Query, backend: &dyn SearchBackend, want: usize) -> Result<Vec<ArticleDoc>, RetrievalError> {
    let mut found = Vec::with_capacity(want);
    let page = want.max(1);
    let mut start = 1;
    while found.len() < want && start <= MAX_SEARCH_DEPTH {
        let hits = backend.results(query, start, page)?;
        let exhausted = hits.len() < page;
        for hit in &hits {
            if found.len() == want {
                break;
            }
            match backend.fetch(hit) {
                Ok(doc) if !doc.is_empty => found.push(doc),
                Ok(_) => {}
                Err(e @ RetrievalError::QuotaExceeded { .. }) => return Err(e),
                Err(e) => warn!("skipping {} (rank {}): {e}", hit.url, hit.rank),
            }
        }
        if exhausted {
            break;
        }
        start += page;
    }
    Ok(found)
}
