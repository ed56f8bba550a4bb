//! Leave-one-event-out evaluation: folds, majority voting, F1 reporting and
//! a lexical baseline classifier.

mod baseline;
mod f1;
mod folds;
mod predictions;
mod vote;

use thiserror::Error;

pub use baseline::{LexicalBaseline, Scenario};
pub use f1::{class_scores, evaluate_threads, macro_f1, macro_from_class_f1, ClassScores, EvalReport, ThreadOutcome};
pub use folds::{folds_from, included, make_folds, FoldSpec};
pub use predictions::{
    evaluate_predictions, read_predictions, run_baseline, write_predictions, PredictionRecord, PREDICTIONS_KIND,
};
pub use vote::{majority_vote, LabelCounts};

use crate::types::Event;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("gold has {gold} labels, predictions have {predicted}")]
    LengthMismatch { gold: usize, predicted: usize },
    #[error("no included threads for event {0}")]
    MissingEvent(Event),
    #[error("model used before training")]
    UntrainedModel,
    #[error("no prediction for test thread {0}")]
    MissingPrediction(String),
    #[error("prediction for unknown thread {0}")]
    UnknownThread(String),
    #[error("thread {thread_id}: pair index {pair_index} outside [0, {top_k})")]
    PairIndexOutOfRange { thread_id: String, pair_index: usize, top_k: usize },
    #[error("thread {thread_id} predicted in fold {found}, belongs to {expected}")]
    WrongFold { thread_id: String, found: Event, expected: Event },
    #[error(transparent)]
    Jsonl(#[from] crate::jsonl::JsonlError),
}
