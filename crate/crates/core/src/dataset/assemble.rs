use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{DatasetError, ThreadEntry};
use crate::jsonl::{self, FileHeader};
use crate::retrieval::ArticleDoc;
use crate::select::{select_sentences, ScoredSentence, SelectError, SelectionConfig, TripleWords};
use crate::text_prep::preprocess;
use crate::types::Strategy;

pub const DATASET_KIND: &str = "dataset";

/// Most articles kept per rumour.
pub const MAX_ARTICLES: usize = 10;

/// Articles retrieved for one thread, in retrieval order across passes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThreadEvidence {
    pub thread_id: String,
    pub strategy: Strategy,
    pub articles: Vec<ArticleDoc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryStatus {
    Complete,
    /// Fewer than `top_k` sentences scored above zero.
    InsufficientSentences,
    NoArticles,
    /// Nothing left of the source tweet after preprocessing.
    EmptyRumour,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnrichedEntry {
    pub thread: ThreadEntry,
    pub strategy_used: Strategy,
    pub status: EntryStatus,
    pub articles: Vec<ArticleDoc>,
    pub selected_sentences: Vec<ScoredSentence>,
}

impl EnrichedEntry {
    pub fn id(&self) -> &str {
        self.thread.id()
    }

    pub fn is_complete(&self) -> bool {
        self.status == EntryStatus::Complete
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssemblyConfig {
    pub selection: SelectionConfig,
    pub max_articles: usize,
    /// Strategy recorded for threads without evidence.
    pub default_strategy: Strategy,
}

impl Default for AssemblyConfig {
    fn default() -> Self {
        Self {
            selection: SelectionConfig::default(),
            max_articles: MAX_ARTICLES,
            default_strategy: Strategy::Preprocessed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssemblyReport {
    pub entries: Vec<EnrichedEntry>,
    pub complete: usize,
}

impl AssemblyReport {
    /// Share of threads with a full sentence quota.
    pub fn completeness_ratio(&self) -> f64 {
        if self.entries.is_empty() {
            0.0
        } else {
            self.complete as f64 / self.entries.len() as f64
        }
    }
}

/// Non-empty articles, first occurrence of each URL, capped.
fn keep_articles(articles: &[ArticleDoc], cap: usize) -> Vec<ArticleDoc> {
    let mut seen = HashSet::new();
    articles
        .iter()
        .filter(|a| !a.is_empty && seen.insert(a.url.as_str()))
        .take(cap)
        .cloned()
        .collect()
}

/// Joins threads with their evidence and selects sentences. Threads missing
/// the sentence quota are kept and flagged.
pub fn assemble(
    threads: &[ThreadEntry],
    evidence: &[ThreadEvidence],
    triples: &dyn TripleWords,
    cfg: &AssemblyConfig,
) -> Result<AssemblyReport, SelectError> {
    cfg.selection.validate()?;
    let mut by_thread: BTreeMap<&str, (Strategy, Vec<ArticleDoc>)> = BTreeMap::new();
    for ev in evidence {
        let slot = by_thread
            .entry(ev.thread_id.as_str())
            .or_insert_with(|| (ev.strategy, Vec::new()));
        slot.1.extend(ev.articles.iter().cloned());
    }
    let entries: Vec<EnrichedEntry> = threads
        .par_iter()
        .map(|thread| {
            let (strategy, found) = by_thread
                .get(thread.id())
                .map(|(s, a)| (*s, a.as_slice()))
                .unwrap_or((cfg.default_strategy, &[]));
            let articles = keep_articles(found, cfg.max_articles);
            let (status, selected_sentences) = match preprocess(&thread.source) {
                Err(_) => (EntryStatus::EmptyRumour, Vec::new()),
                Ok(_) if articles.is_empty() => (EntryStatus::NoArticles, Vec::new()),
                Ok(rumour) => match select_sentences(&rumour, &articles, triples, &cfg.selection) {
                    Ok(s) => (EntryStatus::Complete, s),
                    Err(SelectError::InsufficientEvidence { selected }) => (EntryStatus::InsufficientSentences, selected),
                    Err(_) => (EntryStatus::NoArticles, Vec::new()),
                },
            };
            EnrichedEntry {
                thread: thread.clone(),
                strategy_used: strategy,
                status,
                articles,
                selected_sentences,
            }
        })
        .collect();
    let complete = entries.iter().filter(|e| e.is_complete()).count();
    Ok(AssemblyReport { entries, complete })
}

pub fn write_dataset(path: impl AsRef<Path>, entries: &[EnrichedEntry], header: &FileHeader) -> Result<(), DatasetError> {
    let mut header = header.clone();
    header.kind = DATASET_KIND.to_string();
    Ok(jsonl::write_jsonl(path, &header, entries)?)
}

pub fn read_dataset(path: impl AsRef<Path>) -> Result<(FileHeader, Vec<EnrichedEntry>), DatasetError> {
    Ok(jsonl::read_jsonl(path, DATASET_KIND)?)
}
