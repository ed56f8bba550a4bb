use std::collections::{BTreeSet, HashMap};
use std::io::BufRead;
use std::path::Path;
use std::sync::Arc;

use chrono::{DateTime, NaiveDate, NaiveTime};
use serde::{Deserialize, Deserializer, Serialize};

use super::{ArticleDoc, BackendDescriptor, RetrievalError, SearchBackend, SearchResult};
use crate::query::Query;

pub const BM25_K1: f64 = 1.2;
pub const BM25_B: f64 = 0.75;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusDocument {
    pub url: String,
    #[serde(default)]
    pub title: String,
    #[serde(default)]
    pub paragraphs: Vec<String>,
    #[serde(deserialize_with = "iso_date")]
    pub publish_date: NaiveDate,
}

/// Accepts a bare date or a full RFC 3339 timestamp.
fn iso_date<'de, D: Deserializer<'de>>(d: D) -> Result<NaiveDate, D::Error> {
    let raw = String::deserialize(d)?;
    if let Ok(date) = NaiveDate::parse_from_str(&raw, "%Y-%m-%d") {
        return Ok(date);
    }
    DateTime::parse_from_rfc3339(&raw)
        .map(|t| t.naive_utc().date())
        .map_err(|_| serde::de::Error::custom(format!("not an ISO-8601 date: {raw}")))
}

impl CorpusDocument {
    pub fn text(&self) -> String {
        let mut text = self.title.clone();
        for p in &self.paragraphs {
            text.push('\n');
            text.push_str(p);
        }
        text
    }
}

/// Lowercased alphanumeric runs.
pub fn analyze(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| t.to_lowercase())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Posting {
    pub doc: usize,
    pub tf: u32,
}

#[derive(Debug, Clone)]
pub struct OfflineCorpusIndex {
    documents: Vec<CorpusDocument>,
    postings: HashMap<String, Vec<Posting>>,
    doc_lengths: Vec<usize>,
    avg_doc_length: f64,
    by_url: HashMap<String, usize>,
}

impl OfflineCorpusIndex {
    pub fn build(documents: Vec<CorpusDocument>) -> Result<Self, RetrievalError> {
        let mut postings: HashMap<String, Vec<Posting>> = HashMap::new();
        let mut doc_lengths = Vec::with_capacity(documents.len());
        let mut by_url = HashMap::new();
        for (id, doc) in documents.iter().enumerate() {
            if by_url.insert(doc.url.clone(), id).is_some() {
                return Err(RetrievalError::Corpus {
                    line: id + 1,
                    reason: format!("duplicate url {}", doc.url),
                });
            }
            let terms = analyze(&doc.text());
            doc_lengths.push(terms.len());
            let mut tf: HashMap<String, u32> = HashMap::new();
            for t in terms {
                *tf.entry(t).or_default() += 1;
            }
            for (term, tf) in tf {
                postings.entry(term).or_default().push(Posting { doc: id, tf });
            }
        }
        let total: usize = doc_lengths.iter().sum();
        let avg_doc_length = if documents.is_empty() {
            0.0
        } else {
            total as f64 / documents.len() as f64
        };
        Ok(Self {
            documents,
            postings,
            doc_lengths,
            avg_doc_length,
            by_url,
        })
    }

    pub fn from_reader(reader: impl BufRead) -> Result<Self, RetrievalError> {
        let mut docs = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let doc: CorpusDocument = serde_json::from_str(&line).map_err(|e| RetrievalError::Corpus {
                line: i + 1,
                reason: e.to_string(),
            })?;
            docs.push(doc);
        }
        Self::build(docs)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, RetrievalError> {
        let file = std::fs::File::open(path)?;
        Self::from_reader(std::io::BufReader::new(file))
    }

    pub fn documents(&self) -> &[CorpusDocument] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn postings(&self, term: &str) -> &[Posting] {
        self.postings.get(term).map_or(&[], Vec::as_slice)
    }

    pub fn doc_length(&self, doc: usize) -> usize {
        self.doc_lengths[doc]
    }

    pub fn avg_doc_length(&self) -> f64 {
        self.avg_doc_length
    }

    pub fn document_by_url(&self, url: &str) -> Option<&CorpusDocument> {
        self.by_url.get(url).map(|&i| &self.documents[i])
    }

    /// Distinct analyzed terms of the query body plus its OR-group words.
    pub fn query_terms(query: &Query) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut terms = Vec::new();
        let words = query.body_tokens.iter().chain(query.or_group.iter().flatten());
        for word in words {
            for t in analyze(word) {
                if seen.insert(t.clone()) {
                    terms.push(t);
                }
            }
        }
        terms
    }

    pub fn idf(&self, term: &str) -> f64 {
        let n = self.documents.len() as f64;
        let df = self.postings(term).len() as f64;
        (1.0 + (n - df + 0.5) / (df + 0.5)).ln()
    }

    /// Every document dated before the cutoff with a positive score, best first.
    /// Ties go to the lexicographically smaller url.
    pub fn score_all(&self, query: &Query) -> Vec<(usize, f64)> {
        let mut scores: HashMap<usize, f64> = HashMap::new();
        for term in Self::query_terms(query) {
            let idf = self.idf(&term);
            for p in self.postings(&term) {
                if self.documents[p.doc].publish_date >= query.date_cutoff {
                    continue;
                }
                let tf = p.tf as f64;
                let norm = 1.0 - BM25_B + BM25_B * self.doc_lengths[p.doc] as f64 / self.avg_doc_length;
                *scores.entry(p.doc).or_default() += idf * tf * (BM25_K1 + 1.0) / (tf + BM25_K1 * norm);
            }
        }
        let mut ranked: Vec<(usize, f64)> = scores.into_iter().filter(|&(_, s)| s > 0.0).collect();
        ranked.sort_by(|a, b| {
            b.1.total_cmp(&a.1)
                .then_with(|| self.documents[a.0].url.cmp(&self.documents[b.0].url))
        });
        ranked
    }

    pub fn rank_offline(&self, query: &Query, k: usize) -> Vec<SearchResult> {
        self.score_all(query)
            .into_iter()
            .take(k)
            .enumerate()
            .map(|(i, (doc, _))| SearchResult {
                url: self.documents[doc].url.clone(),
                rank: i + 1,
                backend_name: OFFLINE_NAME.to_string(),
            })
            .collect()
    }
}

const OFFLINE_NAME: &str = "offline";

/// Deterministic backend over a local corpus. Pages are dated at midnight UTC
/// of their publish date.
#[derive(Debug, Clone)]
pub struct OfflineBackend {
    index: Arc<OfflineCorpusIndex>,
    descriptor: BackendDescriptor,
}

impl OfflineBackend {
    pub fn new(index: Arc<OfflineCorpusIndex>) -> Self {
        Self {
            index,
            descriptor: BackendDescriptor {
                name: OFFLINE_NAME.to_string(),
                supports_date_filter: true,
            },
        }
    }

    pub fn index(&self) -> &OfflineCorpusIndex {
        &self.index
    }

    /// Looks a page up by url regardless of date; unknown urls yield an empty document.
    pub fn fetch_url(&self, url: &str, rank: usize) -> ArticleDoc {
        match self.index.document_by_url(url) {
            Some(doc) => to_article(doc, rank),
            None => ArticleDoc::new(url.to_string(), String::new(), Vec::new(), rank, epoch()),
        }
    }
}

fn epoch() -> DateTime<chrono::Utc> {
    DateTime::UNIX_EPOCH
}

fn to_article(doc: &CorpusDocument, rank: usize) -> ArticleDoc {
    let fetch_date = doc.publish_date.and_time(NaiveTime::MIN).and_utc();
    ArticleDoc::new(doc.url.clone(), doc.title.clone(), doc.paragraphs.clone(), rank, fetch_date)
}

impl SearchBackend for OfflineBackend {
    fn descriptor(&self) -> &BackendDescriptor {
        &self.descriptor
    }

    fn results(&self, query: &Query, start: usize, count: usize) -> Result<Vec<SearchResult>, RetrievalError> {
        let start = start.max(1);
        Ok(self
            .index
            .rank_offline(query, start - 1 + count)
            .into_iter()
            .skip(start - 1)
            .collect())
    }

    fn fetch(&self, hit: &SearchResult) -> Result<ArticleDoc, RetrievalError> {
        let doc = self.index.document_by_url(&hit.url).ok_or_else(|| RetrievalError::BackendUnavailable {
            backend: OFFLINE_NAME.to_string(),
            reason: format!("no document for {}", hit.url),
        })?;
        Ok(to_article(doc, hit.rank))
    }
}
