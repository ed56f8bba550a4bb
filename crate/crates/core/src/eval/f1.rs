use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::types::{Event, Label};

/// Precision, recall and F1 per class, indexed by [`Label::index`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassScores {
    /// Rows are gold labels, columns predictions.
    pub confusion: [[usize; 3]; 3],
    pub precision: [f64; 3],
    pub recall: [f64; 3],
    pub f1: [f64; 3],
}

impl ClassScores {
    pub fn macro_f1(&self) -> f64 {
        macro_from_class_f1(&self.f1)
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Per-class scores; any empty denominator yields 0.
pub fn class_scores(gold: &[Label], predicted: &[Label]) -> Result<ClassScores, EvalError> {
    if gold.len() != predicted.len() {
        return Err(EvalError::LengthMismatch {
            gold: gold.len(),
            predicted: predicted.len(),
        });
    }
    let mut confusion = [[0usize; 3]; 3];
    for (g, p) in gold.iter().zip(predicted) {
        confusion[g.index()][p.index()] += 1;
    }
    let mut scores = ClassScores {
        confusion,
        precision: [0.0; 3],
        recall: [0.0; 3],
        f1: [0.0; 3],
    };
    for c in 0..3 {
        let tp = confusion[c][c];
        let predicted_c: usize = (0..3).map(|g| confusion[g][c]).sum();
        let gold_c: usize = confusion[c].iter().sum();
        let p = ratio(tp, predicted_c);
        let r = ratio(tp, gold_c);
        scores.precision[c] = p;
        scores.recall[c] = r;
        scores.f1[c] = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
    }
    Ok(scores)
}

/// Unweighted mean of per-class F1 values.
pub fn macro_from_class_f1(f1: &[f64]) -> f64 {
    if f1.is_empty() {
        return 0.0;
    }
    f1.iter().sum::<f64>() / f1.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Macro F1 within each held-out event.
    pub per_event_f1: BTreeMap<Event, f64>,
    pub per_class_f1: BTreeMap<Label, f64>,
    pub macro_f1: f64,
    pub confusion: [[usize; 3]; 3],
    pub n: usize,
}

impl EvalReport {
    fn from_scores(scores: &ClassScores, per_event_f1: BTreeMap<Event, f64>) -> Self {
        let report = Self {
            per_event_f1,
            per_class_f1: Label::ALL.into_iter().map(|l| (l, scores.f1[l.index()])).collect(),
            macro_f1: scores.macro_f1(),
            confusion: scores.confusion,
            n: scores.confusion.iter().flatten().sum(),
        };
        debug_assert!(report.is_consistent());
        report
    }

    /// Macro equals the mean of the per-class values and every F1 lies in [0, 1].
    pub fn is_consistent(&self) -> bool {
        let classes: Vec<f64> = self.per_class_f1.values().copied().collect();
        let in_range = |v: &f64| (0.0..=1.0).contains(v);
        (macro_from_class_f1(&classes) - self.macro_f1).abs() <= 1e-9
            && classes.iter().all(in_range)
            && self.per_event_f1.values().all(in_range)
    }

    pub fn table_header() -> String {
        let mut out = format!("{:<24} |", "");
        for e in Event::table_order() {
            let _ = write!(out, " {:>6}", e.abbrev());
        }
        out.push_str(" |");
        for l in Label::ALL {
            let _ = write!(out, " {:>6}", l.short_name());
        }
        let _ = write!(out, " | {:>7}", "MacroF1");
        out
    }

    /// One aligned row: per-event, per-class and macro F1 to three decimals.
    pub fn table_row(&self, name: &str) -> String {
        let mut out = format!("{name:<24} |");
        for e in Event::table_order() {
            match self.per_event_f1.get(&e) {
                Some(v) => {
                    let _ = write!(out, " {v:>6.3}");
                }
                None => {
                    let _ = write!(out, " {:>6}", "-");
                }
            }
        }
        out.push_str(" |");
        for l in Label::ALL {
            let _ = write!(out, " {:>6.3}", self.per_class_f1.get(&l).copied().unwrap_or(0.0));
        }
        let _ = write!(out, " | {:>7.3}", self.macro_f1);
        out
    }
}

/// Scores aligned label lists without per-event breakdown.
pub fn macro_f1(gold: &[Label], predicted: &[Label]) -> Result<EvalReport, EvalError> {
    let scores = class_scores(gold, predicted)?;
    Ok(EvalReport::from_scores(&scores, BTreeMap::new()))
}

/// Thread-level outcome after voting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThreadOutcome {
    pub thread_id: String,
    pub event: Event,
    pub gold: Label,
    pub predicted: Label,
}

/// Pooled per-class scores plus macro F1 within each event.
pub fn evaluate_threads(outcomes: &[ThreadOutcome]) -> Result<EvalReport, EvalError> {
    let gold: Vec<Label> = outcomes.iter().map(|o| o.gold).collect();
    let predicted: Vec<Label> = outcomes.iter().map(|o| o.predicted).collect();
    let pooled = class_scores(&gold, &predicted)?;
    let mut per_event = BTreeMap::new();
    for event in Event::ALL {
        let (g, p): (Vec<Label>, Vec<Label>) = outcomes
            .iter()
            .filter(|o| o.event == event)
            .map(|o| (o.gold, o.predicted))
            .unzip();
        if !g.is_empty() {
            per_event.insert(event, class_scores(&g, &p)?.macro_f1());
        }
    }
    Ok(EvalReport::from_scores(&pooled, per_event))
}

#[cfg(test)]
mod tests {
    use super::*;
    use Label::*;

    #[test]
    fn perfect_predictions() {
        let gold = [False, True, Unverified, True];
        let r = macro_f1(&gold, &gold).unwrap();
        assert_eq!(r.macro_f1, 1.0);
    }

    #[test]
    fn nine_item_confusion_by_hand() {
        // gold F F F T T T U U U
        // pred F F T T T U U F U
        let gold = [False, False, False, True, True, True, Unverified, Unverified, Unverified];
        let pred = [False, False, True, True, True, Unverified, Unverified, False, Unverified];
        let s = class_scores(&gold, &pred).unwrap();
        assert_eq!(s.confusion, [[2, 1, 0], [0, 2, 1], [1, 0, 2]]);
        for c in 0..3 {
            assert!((s.precision[c] - 2.0 / 3.0).abs() < 1e-12);
            assert!((s.recall[c] - 2.0 / 3.0).abs() < 1e-12);
            assert!((s.f1[c] - 2.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn never_predicted_class_scores_zero() {
        let s = class_scores(&[False, True], &[True, True]).unwrap();
        assert_eq!(s.f1[False.index()], 0.0);
        assert_eq!(s.f1[Unverified.index()], 0.0);
        assert!((s.f1[True.index()] - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn length_mismatch() {
        assert!(matches!(macro_f1(&[True], &[]), Err(EvalError::LengthMismatch { gold: 1, predicted: 0 })));
    }

    #[test]
    fn per_event_macro() {
        let o = |id: &str, event, gold, predicted| ThreadOutcome {
            thread_id: id.into(),
            event,
            gold,
            predicted,
        };
        let outcomes = vec![
            o("a", Event::Ferguson, Unverified, Unverified),
            o("b", Event::Ferguson, True, Unverified),
            o("c", Event::SydneySiege, True, True),
        ];
        let r = evaluate_threads(&outcomes).unwrap();
        assert!(r.is_consistent());
        // Ferguson: U F1 = 2/3, T F1 = 0, F F1 = 0
        assert!((r.per_event_f1[&Event::Ferguson] - 2.0 / 9.0).abs() < 1e-12);
        assert!((r.per_event_f1[&Event::SydneySiege] - 1.0 / 3.0).abs() < 1e-12);
        assert!(!r.per_event_f1.contains_key(&Event::CharlieHebdo));
        let header = EvalReport::table_header();
        assert!(header.contains("Ch") && header.contains("Unv") && header.contains("MacroF1"));
        assert!(r.table_row("x").contains("0.222"));
    }
}
