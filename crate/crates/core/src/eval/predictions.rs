use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    evaluate_threads, included, majority_vote, EvalError, EvalReport, FoldSpec, LabelCounts, LexicalBaseline, Scenario,
    ThreadOutcome,
};
use crate::dataset::EnrichedEntry;
use crate::jsonl::{self, FileHeader};
use crate::types::{Event, Label};

pub const PREDICTIONS_KIND: &str = "predictions";

/// One classifier decision for a (rumour, evidence sentence) pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub thread_id: String,
    pub pair_index: usize,
    pub predicted_label: Label,
    pub fold: Event,
}

pub fn write_predictions(path: impl AsRef<Path>, records: &[PredictionRecord], header: &FileHeader) -> Result<(), EvalError> {
    let mut header = header.clone();
    header.kind = PREDICTIONS_KIND.to_string();
    Ok(jsonl::write_jsonl(path, &header, records)?)
}

/// Reads prediction records; a header is optional so external tools can
/// write bare JSON Lines.
pub fn read_predictions(path: impl AsRef<Path>) -> Result<Vec<PredictionRecord>, EvalError> {
    Ok(jsonl::read_records(path, PREDICTIONS_KIND)?)
}

/// Trains and applies the baseline on every fold in parallel.
pub fn run_baseline(entries: &[EnrichedEntry], folds: &[FoldSpec], scenario: Scenario) -> Result<Vec<PredictionRecord>, EvalError> {
    let by_id: HashMap<&str, &EnrichedEntry> = included(entries).into_iter().map(|e| (e.id(), e)).collect();
    let lookup = |ids: &[String]| -> Result<Vec<&EnrichedEntry>, EvalError> {
        ids.iter()
            .map(|id| by_id.get(id.as_str()).copied().ok_or_else(|| EvalError::UnknownThread(id.clone())))
            .collect()
    };
    let per_fold = folds
        .par_iter()
        .map(|fold| {
            let model = LexicalBaseline::fit(&lookup(&fold.train_ids)?, scenario);
            let mut records = Vec::new();
            for entry in lookup(&fold.test_ids)? {
                records.extend(model.classify(entry, scenario, fold.held_out_event)?);
            }
            Ok(records)
        })
        .collect::<Result<Vec<Vec<PredictionRecord>>, EvalError>>()?;
    Ok(per_fold.into_iter().flatten().collect())
}

/// Votes each test thread's records into one label and scores the result.
/// Ties fall back to label frequencies in the thread's training split.
pub fn evaluate_predictions(
    entries: &[EnrichedEntry],
    folds: &[FoldSpec],
    records: &[PredictionRecord],
    top_k: usize,
) -> Result<(EvalReport, Vec<ThreadOutcome>), EvalError> {
    let gold: HashMap<&str, (Event, Label)> = entries.iter().map(|e| (e.id(), (e.thread.event, e.thread.label))).collect();
    let mut votes: BTreeMap<&str, Vec<Label>> = BTreeMap::new();
    for r in records {
        let (event, _) = gold.get(r.thread_id.as_str()).ok_or_else(|| EvalError::UnknownThread(r.thread_id.clone()))?;
        if r.pair_index >= top_k {
            return Err(EvalError::PairIndexOutOfRange {
                thread_id: r.thread_id.clone(),
                pair_index: r.pair_index,
                top_k,
            });
        }
        if r.fold != *event {
            return Err(EvalError::WrongFold {
                thread_id: r.thread_id.clone(),
                found: r.fold,
                expected: *event,
            });
        }
        votes.entry(r.thread_id.as_str()).or_default().push(r.predicted_label);
    }

    let mut outcomes = Vec::new();
    for fold in folds {
        let training = LabelCounts::tally(fold.train_ids.iter().filter_map(|id| gold.get(id.as_str()).map(|g| g.1)));
        for id in &fold.test_ids {
            let (event, label) = gold.get(id.as_str()).ok_or_else(|| EvalError::UnknownThread(id.clone()))?;
            let thread_votes = votes.get(id.as_str()).ok_or_else(|| EvalError::MissingPrediction(id.clone()))?;
            let predicted = majority_vote(thread_votes.iter().copied(), &training).ok_or_else(|| EvalError::MissingPrediction(id.clone()))?;
            outcomes.push(ThreadOutcome {
                thread_id: id.clone(),
                event: *event,
                gold: *label,
                predicted,
            });
        }
    }
    let report = evaluate_threads(&outcomes)?;
    Ok((report, outcomes))
}
