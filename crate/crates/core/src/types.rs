//! Small enums shared by every stage.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The five breaking-news events of the PHEME-5 rumour corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Event {
    #[serde(rename = "charliehebdo")]
    CharlieHebdo,
    #[serde(rename = "sydneysiege")]
    SydneySiege,
    #[serde(rename = "ferguson")]
    Ferguson,
    #[serde(rename = "ottawashooting")]
    OttawaShooting,
    #[serde(rename = "germanwings-crash")]
    GermanwingsCrash,
}

impl Event {
    pub const ALL: [Event; 5] = [
        Event::CharlieHebdo,
        Event::SydneySiege,
        Event::Ferguson,
        Event::OttawaShooting,
        Event::GermanwingsCrash,
    ];

    /// Directory / serialization key, as used by the PHEME release.
    pub fn key(self) -> &'static str {
        match self {
            Event::CharlieHebdo => "charliehebdo",
            Event::SydneySiege => "sydneysiege",
            Event::Ferguson => "ferguson",
            Event::OttawaShooting => "ottawashooting",
            Event::GermanwingsCrash => "germanwings-crash",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            Event::CharlieHebdo => "Charlie Hebdo",
            Event::SydneySiege => "Sydney Siege",
            Event::Ferguson => "Ferguson",
            Event::OttawaShooting => "Ottawa Shooting",
            Event::GermanwingsCrash => "Germanwings Crash",
        }
    }

    /// Two-letter column heading used in evaluation tables.
    pub fn abbrev(self) -> &'static str {
        match self {
            Event::CharlieHebdo => "Ch",
            Event::SydneySiege => "Sy",
            Event::Ferguson => "Fe",
            Event::OttawaShooting => "Ot",
            Event::GermanwingsCrash => "Ge",
        }
    }

    /// Events in the column order of evaluation tables (alphabetical).
    pub fn table_order() -> [Event; 5] {
        [
            Event::CharlieHebdo,
            Event::Ferguson,
            Event::GermanwingsCrash,
            Event::OttawaShooting,
            Event::SydneySiege,
        ]
    }

    /// Matches directory names such as `charliehebdo-all-rnr-threads` or
    /// `germanwings-crash`.
    pub fn from_dir_name(name: &str) -> Option<Event> {
        let squashed: String = name
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .map(|c| c.to_ascii_lowercase())
            .collect();
        Event::ALL.into_iter().find(|e| {
            let key: String = e.key().chars().filter(|c| c.is_ascii_alphanumeric()).collect();
            squashed.starts_with(&key)
        })
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Event {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Event::from_dir_name(s).ok_or_else(|| format!("unknown event `{s}`"))
    }
}

/// Gold veracity label. The derived order (False < True < Unverified) is the
/// final tie-break of majority voting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    False,
    True,
    Unverified,
}

impl Label {
    pub const ALL: [Label; 3] = [Label::False, Label::True, Label::Unverified];

    pub fn index(self) -> usize {
        match self {
            Label::False => 0,
            Label::True => 1,
            Label::Unverified => 2,
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            Label::False => "False",
            Label::True => "True",
            Label::Unverified => "Unv",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::False => "false",
            Label::True => "true",
            Label::Unverified => "unverified",
        })
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "false" => Ok(Label::False),
            "true" => Ok(Label::True),
            "unverified" | "unv" => Ok(Label::Unverified),
            _ => Err(format!("unknown label `{s}`")),
        }
    }
}

/// Query formulation strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// The whole preprocessed tweet.
    Preprocessed,
    /// Tokens retained by dependency relation.
    #[serde(rename = "deprel")]
    DeprelShortened,
    /// Tokens covered by subject/predicate/object triples.
    #[serde(rename = "triple")]
    TripleShortened,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [
        Strategy::Preprocessed,
        Strategy::DeprelShortened,
        Strategy::TripleShortened,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Strategy::Preprocessed => "preprocessed",
            Strategy::DeprelShortened => "deprel",
            Strategy::TripleShortened => "triple",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "preprocessed" => Ok(Strategy::Preprocessed),
            "deprel" => Ok(Strategy::DeprelShortened),
            "triple" => Ok(Strategy::TripleShortened),
            _ => Err(format!("unknown strategy `{s}` (expected preprocessed, deprel or triple)")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn event_from_pheme_dir_names() {
        assert_eq!(Event::from_dir_name("charliehebdo-all-rnr-threads"), Some(Event::CharlieHebdo));
        assert_eq!(Event::from_dir_name("germanwings-crash-all-rnr-threads"), Some(Event::GermanwingsCrash));
        assert_eq!(Event::from_dir_name("ebola-essien-all-rnr-threads"), None);
    }

    #[test]
    fn label_order_is_false_true_unverified() {
        let mut labels = vec![Label::Unverified, Label::True, Label::False];
        labels.sort();
        assert_eq!(labels, Label::ALL);
    }

    #[test]
    fn strategy_round_trips_through_serde() {
        for s in Strategy::ALL {
            let json = serde_json::to_string(&s).unwrap();
            assert_eq!(json, format!("\"{}\"", s.key()));
            assert_eq!(serde_json::from_str::<Strategy>(&json).unwrap(), s);
        }
    }
}
