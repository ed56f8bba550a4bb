use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{EnrichedEntry, ThreadEntry};
use crate::types::{Event, Label};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventStats {
    pub threads: usize,
    pub true_count: usize,
    pub false_count: usize,
    pub unverified_count: usize,
    pub articles: usize,
}

impl EventStats {
    fn add(&mut self, label: Label, articles: usize) {
        self.threads += 1;
        match label {
            Label::True => self.true_count += 1,
            Label::False => self.false_count += 1,
            Label::Unverified => self.unverified_count += 1,
        }
        self.articles += articles;
    }

    fn merge(&mut self, other: &EventStats) {
        self.threads += other.threads;
        self.true_count += other.true_count;
        self.false_count += other.false_count;
        self.unverified_count += other.unverified_count;
        self.articles += other.articles;
    }

    pub fn label_sum(&self) -> usize {
        self.true_count + self.false_count + self.unverified_count
    }
}

/// Thread, label and article counts per event, with totals.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub per_event: BTreeMap<Event, EventStats>,
    pub totals: EventStats,
}

impl CorpusStats {
    pub fn from_threads(threads: &[ThreadEntry]) -> Self {
        Self::tally(threads.iter().map(|t| (t.event, t.label, 0)))
    }

    pub fn from_entries(entries: &[EnrichedEntry]) -> Self {
        Self::tally(entries.iter().map(|e| (e.thread.event, e.thread.label, e.articles.len())))
    }

    fn tally(rows: impl Iterator<Item = (Event, Label, usize)>) -> Self {
        let mut stats = CorpusStats::default();
        for (event, label, articles) in rows {
            stats.per_event.entry(event).or_default().add(label, articles);
        }
        for s in stats.per_event.values() {
            stats.totals.merge(s);
        }
        stats
    }

    /// Checks that label counts sum to thread counts per event and that
    /// events sum to the totals.
    pub fn cross_foot(&self) -> Result<(), String> {
        let mut sum = EventStats::default();
        for (event, s) in &self.per_event {
            if s.label_sum() != s.threads {
                return Err(format!("{event}: labels sum to {} but {} threads", s.label_sum(), s.threads));
            }
            sum.merge(s);
        }
        if sum != self.totals {
            return Err(format!("event rows sum to {sum:?}, totals are {:?}", self.totals));
        }
        if self.totals.label_sum() != self.totals.threads {
            return Err("total labels do not sum to total threads".into());
        }
        Ok(())
    }
}

impl fmt::Display for CorpusStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<18} {:>8} {:>6} {:>6} {:>11} {:>9}",
            "Events", "Threads", "True", "False", "Unverified", "Articles"
        )?;
        let row = |f: &mut fmt::Formatter<'_>, name: &str, s: &EventStats| {
            writeln!(
                f,
                "{:<18} {:>8} {:>6} {:>6} {:>11} {:>9}",
                name, s.threads, s.true_count, s.false_count, s.unverified_count, s.articles
            )
        };
        for event in Event::ALL {
            if let Some(s) = self.per_event.get(&event) {
                row(f, event.display_name(), s)?;
            }
        }
        row(f, "Total Threads", &self.totals)
    }
}
