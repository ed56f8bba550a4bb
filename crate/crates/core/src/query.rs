//! Date-restricted search queries.
//!
//! A query renders as `before:YYYY-MM-DD`, then the segmented trailing
//! hashtags in brackets (an OR-group, shortened strategies only), then the
//! body tokens:
//!
//! ```text
//! before:2015-01-09 (Charlie Hebdo) Massacre suspects small industrial town northeast
//! ```

use std::fmt;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::parse_ingest::{extract_triples, retain_by_deprel, ParsedSentence, Triple, QUERY_RELATIONS};
use crate::text_prep::{segment_hashtag, PreprocessedTweet, SegmentationDictionary};
use crate::types::Strategy;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QueryError {
    #[error("strategy {strategy} needs a dependency parse for tweet {source_id}")]
    MissingParse { strategy: Strategy, source_id: String },
    #[error("shortening removed every token of tweet {source_id}")]
    EmptyQueryBody { source_id: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Query {
    pub strategy: Strategy,
    /// Results must predate this day.
    pub date_cutoff: NaiveDate,
    pub body_tokens: Vec<String>,
    /// One word list per trailing hashtag.
    pub or_group: Vec<Vec<String>>,
}

impl Query {
    /// The wire form sent to a search backend.
    pub fn render(&self) -> String {
        let mut out = format!("before:{}", self.date_cutoff.format("%Y-%m-%d"));
        let or_words: Vec<&str> = self.or_group.iter().flatten().map(String::as_str).collect();
        if !or_words.is_empty() {
            out.push_str(" (");
            out.push_str(&or_words.join(" "));
            out.push(')');
        }
        for token in &self.body_tokens {
            out.push(' ');
            out.push_str(token);
        }
        out
    }

    /// Body plus OR-group words, for backends that take plain terms.
    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.body_tokens
            .iter()
            .chain(self.or_group.iter().flatten())
            .map(String::as_str)
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Builds the query for one tweet under `strategy`.
///
/// `DeprelShortened` needs `parse`. `TripleShortened` uses `triples` when
/// given and otherwise extracts them heuristically from `parse`.
pub fn build_query(
    tweet: &PreprocessedTweet,
    parse: Option<&ParsedSentence>,
    triples: Option<&[Triple]>,
    strategy: Strategy,
    dict: &SegmentationDictionary,
) -> Result<Query, QueryError> {
    let missing_parse = || QueryError::MissingParse {
        strategy,
        source_id: tweet.source_id.clone(),
    };

    let body_tokens: Vec<String> = match strategy {
        Strategy::Preprocessed => tweet.tokens.clone(),
        Strategy::DeprelShortened => {
            let parse = parse.ok_or_else(missing_parse)?;
            retain_by_deprel(parse, &QUERY_RELATIONS)
                .into_iter()
                .map(|t| t.surface.clone())
                .collect()
        }
        Strategy::TripleShortened => {
            let parse = parse.ok_or_else(missing_parse)?;
            let extracted;
            let triples = match triples {
                Some(t) => t,
                None => {
                    extracted = extract_triples(parse);
                    &extracted
                }
            };
            let mut indices: Vec<usize> = triples
                .iter()
                .flat_map(Triple::indices)
                .filter(|&i| i >= 1 && i <= parse.len())
                .collect();
            indices.sort_unstable();
            indices.dedup();
            parse.surfaces(&indices)
        }
    };

    if body_tokens.is_empty() {
        return Err(QueryError::EmptyQueryBody {
            source_id: tweet.source_id.clone(),
        });
    }

    let or_group = match strategy {
        Strategy::Preprocessed => Vec::new(),
        _ => tweet
            .trailing_hashtags
            .iter()
            .map(|tag| segment_hashtag(tag, dict))
            .collect(),
    };

    Ok(Query {
        strategy,
        date_cutoff: tweet.date_cutoff,
        body_tokens,
        or_group,
    })
}
