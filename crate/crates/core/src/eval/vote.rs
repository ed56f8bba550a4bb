use serde::{Deserialize, Serialize};

use crate::types::Label;

/// Occurrences of each label, indexed by [`Label::index`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelCounts(pub [usize; 3]);

impl LabelCounts {
    pub fn tally(labels: impl IntoIterator<Item = Label>) -> Self {
        let mut c = Self::default();
        for l in labels {
            c.0[l.index()] += 1;
        }
        c
    }

    pub fn get(&self, label: Label) -> usize {
        self.0[label.index()]
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }
}

/// Most frequent label. Ties go to the label more frequent in `training`,
/// then to the earlier of False, True, Unverified. `None` without votes.
pub fn majority_vote(votes: impl IntoIterator<Item = Label>, training: &LabelCounts) -> Option<Label> {
    let counts = LabelCounts::tally(votes);
    if counts.total() == 0 {
        return None;
    }
    Label::ALL.into_iter().max_by(|a, b| {
        counts
            .get(*a)
            .cmp(&counts.get(*b))
            .then(training.get(*a).cmp(&training.get(*b)))
            .then(b.cmp(a))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use Label::*;

    #[test]
    fn strict_majority() {
        assert_eq!(majority_vote([True, True, False, Unverified, True], &LabelCounts::default()), Some(True));
        assert_eq!(majority_vote([False], &LabelCounts::default()), Some(False));
        assert_eq!(majority_vote([], &LabelCounts::default()), None);
    }

    #[test]
    fn tie_goes_to_training_majority_then_fixed_order() {
        let prior = LabelCounts([3, 10, 5]);
        assert_eq!(majority_vote([True, True, False, False, Unverified], &prior), Some(True));
        let prior = LabelCounts([10, 3, 5]);
        assert_eq!(majority_vote([True, True, False, False, Unverified], &prior), Some(False));
        assert_eq!(majority_vote([Unverified, True], &LabelCounts([0, 4, 4])), Some(True));
        assert_eq!(majority_vote([Unverified, False], &LabelCounts::default()), Some(False));
    }
}
