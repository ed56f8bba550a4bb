use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{EvalError, LabelCounts, PredictionRecord};
use crate::dataset::EnrichedEntry;
use crate::text_prep::{is_word_token, preprocess, tokenize};
use crate::types::{Event, Label};

/// Which texts the classifier sees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    RumourOnly,
    EvidenceOnly,
    RumourPlusEvidence,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::RumourPlusEvidence, Scenario::RumourOnly, Scenario::EvidenceOnly];

    pub fn key(self) -> &'static str {
        match self {
            Scenario::RumourOnly => "rumour",
            Scenario::EvidenceOnly => "evidence",
            Scenario::RumourPlusEvidence => "rumour+evidence",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            Scenario::RumourOnly => "Rumour",
            Scenario::EvidenceOnly => "Evidence",
            Scenario::RumourPlusEvidence => "Rumour + Ev.",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rumour" | "rumour-only" => Ok(Scenario::RumourOnly),
            "evidence" | "evidence-only" => Ok(Scenario::EvidenceOnly),
            "rumour+evidence" | "rumour-plus-evidence" | "both" => Ok(Scenario::RumourPlusEvidence),
            _ => Err(format!("unknown scenario `{s}`")),
        }
    }
}

fn words(tokens: impl IntoIterator<Item = impl AsRef<str>>) -> Vec<String> {
    tokens
        .into_iter()
        .filter(|t| is_word_token(t.as_ref()))
        .map(|t| t.as_ref().to_lowercase())
        .collect()
}

/// Input documents for an entry: one per (rumour, sentence) pair in the
/// evidence scenarios, falling back to the rumour alone without sentences.
pub fn documents(entry: &EnrichedEntry, scenario: Scenario) -> Vec<Vec<String>> {
    let rumour = preprocess(&entry.thread.source).map(|p| words(&p.tokens)).unwrap_or_default();
    let sentences = &entry.selected_sentences;
    if scenario == Scenario::RumourOnly || sentences.is_empty() {
        return vec![rumour];
    }
    sentences
        .iter()
        .map(|s| {
            let sentence = if s.tokens.is_empty() { words(tokenize(&s.text)) } else { words(&s.tokens) };
            match scenario {
                Scenario::EvidenceOnly => sentence,
                _ => rumour.iter().cloned().chain(sentence).collect(),
            }
        })
        .collect()
}

#[derive(Debug, Clone)]
struct Trained {
    priors: LabelCounts,
    counts: [HashMap<String, usize>; 3],
    totals: [usize; 3],
    vocabulary: HashSet<String>,
}

/// Multinomial naive Bayes over lowercase word tokens with add-one smoothing.
/// Labels absent from training are never predicted.
#[derive(Debug, Clone, Default)]
pub struct LexicalBaseline {
    model: Option<Trained>,
}

impl LexicalBaseline {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn train<I, D>(&mut self, documents: I)
    where
        I: IntoIterator<Item = (D, Label)>,
        D: IntoIterator<Item = String>,
    {
        let mut model = Trained {
            priors: LabelCounts::default(),
            counts: Default::default(),
            totals: [0; 3],
            vocabulary: HashSet::new(),
        };
        for (doc, label) in documents {
            let c = label.index();
            model.priors.0[c] += 1;
            for w in doc {
                model.totals[c] += 1;
                model.vocabulary.insert(w.clone());
                *model.counts[c].entry(w).or_default() += 1;
            }
        }
        self.model = (model.priors.total() > 0).then_some(model);
    }

    /// Trains on the given entries' documents for a scenario.
    pub fn fit(entries: &[&EnrichedEntry], scenario: Scenario) -> Self {
        let mut model = Self::new();
        model.train(
            entries
                .iter()
                .flat_map(|e| documents(e, scenario).into_iter().map(move |d| (d, e.thread.label))),
        );
        model
    }

    /// Training documents per label, `None` before training.
    pub fn priors(&self) -> Option<LabelCounts> {
        self.model.as_ref().map(|m| m.priors)
    }

    pub fn predict(&self, words: &[String]) -> Result<Label, EvalError> {
        let m = self.model.as_ref().ok_or(EvalError::UntrainedModel)?;
        let n = m.priors.total() as f64;
        let v = m.vocabulary.len() as f64;
        let mut best: Option<(f64, Label)> = None;
        for label in Label::ALL {
            let c = label.index();
            if m.priors.0[c] == 0 {
                continue;
            }
            let denominator = (m.totals[c] as f64 + v).ln();
            let mut score = (m.priors.0[c] as f64 / n).ln();
            for w in words.iter().filter(|w| m.vocabulary.contains(*w)) {
                let count = m.counts[c].get(w).copied().unwrap_or(0) as f64;
                score += (count + 1.0).ln() - denominator;
            }
            let better = match best {
                None => true,
                Some((s, b)) => score > s || (score == s && m.priors.get(label) > m.priors.get(b)),
            };
            if better {
                best = Some((score, label));
            }
        }
        best.map(|(_, l)| l).ok_or(EvalError::UntrainedModel)
    }

    /// One record per (rumour, sentence) pair, or a single record for the rumour alone.
    pub fn classify(&self, entry: &EnrichedEntry, scenario: Scenario, fold: Event) -> Result<Vec<PredictionRecord>, EvalError> {
        documents(entry, scenario)
            .iter()
            .enumerate()
            .map(|(pair_index, doc)| {
                Ok(PredictionRecord {
                    thread_id: entry.id().to_string(),
                    pair_index,
                    predicted_label: self.predict(doc)?,
                    fold,
                })
            })
            .collect()
    }
}
