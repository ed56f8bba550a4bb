use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::dataset::EnrichedEntry;
use crate::types::Event;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldSpec {
    pub held_out_event: Event,
    pub train_ids: Vec<String>,
    pub test_ids: Vec<String>,
}

/// Entries with a full sentence quota.
pub fn included(entries: &[EnrichedEntry]) -> Vec<&EnrichedEntry> {
    entries.iter().filter(|e| e.is_complete()).collect()
}

/// One fold per event over the entries meeting the sentence quota.
pub fn make_folds(entries: &[EnrichedEntry]) -> Result<Vec<FoldSpec>, EvalError> {
    folds_from(included(entries).into_iter().map(|e| (e.id().to_string(), e.thread.event)))
}

/// One fold per event in [`Event::ALL`] order; ids are sorted within each split.
pub fn folds_from(threads: impl IntoIterator<Item = (String, Event)>) -> Result<Vec<FoldSpec>, EvalError> {
    let mut by_event: BTreeMap<Event, Vec<String>> = BTreeMap::new();
    for (id, event) in threads {
        by_event.entry(event).or_default().push(id);
    }
    for ids in by_event.values_mut() {
        ids.sort();
        ids.dedup();
    }
    if let Some(missing) = Event::ALL.into_iter().find(|e| !by_event.contains_key(e)) {
        return Err(EvalError::MissingEvent(missing));
    }
    Ok(Event::ALL
        .into_iter()
        .map(|held_out_event| {
            let mut train_ids: Vec<String> = by_event
                .iter()
                .filter(|(e, _)| **e != held_out_event)
                .flat_map(|(_, ids)| ids.iter().cloned())
                .collect();
            train_ids.sort();
            FoldSpec {
                held_out_event,
                train_ids,
                test_ids: by_event[&held_out_event].clone(),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_threads_over_five_events() {
        let threads: Vec<(String, Event)> = (0..10).map(|i| (format!("t{i}"), Event::ALL[i % 5])).collect();
        let folds = folds_from(threads.clone()).unwrap();
        assert_eq!(folds.len(), 5);
        for fold in &folds {
            assert_eq!(fold.test_ids.len(), 2);
            assert_eq!(fold.train_ids.len(), 8);
            for (id, event) in &threads {
                let in_test = fold.test_ids.contains(id);
                let in_train = fold.train_ids.contains(id);
                assert!(in_test ^ in_train);
                assert_eq!(in_test, *event == fold.held_out_event);
            }
        }
    }

    #[test]
    fn four_events_is_an_error() {
        let threads = (0..8).map(|i| (format!("t{i}"), Event::ALL[i % 4]));
        assert!(matches!(folds_from(threads), Err(EvalError::MissingEvent(Event::GermanwingsCrash))));
    }
}
