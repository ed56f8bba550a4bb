//! Evidence enrichment toolkit for social-media rumour verification.
//!
//! The pipeline runs in stages, each of which can be used on its own:
//!
//! * [`text_prep`]: tweet normalisation and hashtag segmentation.
//! * [`parse_ingest`]: CoNLL-U ingestion, relation-based shortening and
//!   subject/predicate/object triples.
//! * [`query`]: date-restricted search queries for the three formulation
//!   strategies.
//! * [`retrieval`]: search backends (offline BM25 index, live HTTP API) and
//!   article extraction.
//! * [`metrics`]: retrieval quality metrics over word embeddings and an
//!   optional external pair scorer.
//! * [`select`]: evidence sentence selection by triple-word overlap.
//! * [`dataset`]: corpus loading, assembly, statistics and URL overlap.
//! * [`eval`]: leave-one-event-out evaluation with majority voting.

pub mod dataset;
pub mod eval;
pub mod jsonl;
pub mod metrics;
pub mod parse_ingest;
pub mod query;
pub mod retrieval;
pub mod select;
pub mod stopwords;
pub mod text_prep;
pub mod types;

pub use types::{Event, Label, Strategy};
