//! Dependency parse ingestion (CoNLL-U), relation-based token retention and
//! subject/predicate/object triples.

mod conllu;
mod retain;
mod triples;

use std::path::PathBuf;

use thiserror::Error;

pub use conllu::{parse_conllu, read_parses, read_parses_lenient, ParseBatch, ParseToken, ParsedSentence};
pub use retain::{retain_by_deprel, MODIFIER_HEAD_RELATIONS, QUERY_RELATIONS};
pub use triples::{extract_triples, parse_triples_tsv, read_triples, read_triples_lenient, Triple, TripleBatch};

#[derive(Debug, Error)]
pub enum ParseIngestError {
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed parse at line {line}: {reason}")]
    MalformedParse { line: usize, reason: String },
    #[error("malformed triple at line {line}: {reason}")]
    MalformedTriple { line: usize, reason: String },
    #[error("triple for sentence `{id}`: {field} span not found in the parse")]
    SpanNotFound { id: String, field: String },
    #[error("triple line {line} refers to unknown sentence `{id}`")]
    UnknownSentence { line: usize, id: String },
}
