use std::cmp::Ordering;
use std::collections::HashMap;
use std::io::{self, BufRead};
use std::ops::Range;
use std::path::Path;

use num_bigint::BigUint;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DictionaryError {
    #[error("reading dictionary: {0}")]
    Io(#[from] io::Error),
    #[error("dictionary line {line}: expected `word<TAB>count`")]
    Malformed { line: usize },
}

/// Unigram word frequencies used for hashtag and URL segmentation.
#[derive(Debug, Clone, Default)]
pub struct SegmentationDictionary {
    counts: HashMap<String, u64>,
    total: u64,
    longest: usize,
}

impl SegmentationDictionary {
    /// Builds a dictionary; words are lowercased and duplicate entries summed.
    pub fn from_counts<I, S>(entries: I) -> Self
    where
        I: IntoIterator<Item = (S, u64)>,
        S: AsRef<str>,
    {
        let mut dict = Self::default();
        for (word, count) in entries {
            let word = word.as_ref().to_lowercase();
            if word.is_empty() {
                continue;
            }
            dict.longest = dict.longest.max(word.chars().count());
            dict.total += count;
            *dict.counts.entry(word).or_insert(0) += count;
        }
        dict
    }

    /// Reads `word<TAB>count` lines. Blank lines and `#` comments are skipped.
    pub fn from_reader(reader: impl BufRead) -> Result<Self, DictionaryError> {
        let mut entries = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut parts = trimmed.split('\t');
            let (Some(word), Some(count), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(DictionaryError::Malformed { line: i + 1 });
            };
            let count: u64 = count
                .trim()
                .parse()
                .map_err(|_| DictionaryError::Malformed { line: i + 1 })?;
            entries.push((word.trim().to_string(), count));
        }
        Ok(Self::from_counts(entries))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, DictionaryError> {
        let file = std::fs::File::open(path)?;
        Self::from_reader(io::BufReader::new(file))
    }

    pub fn count(&self, word: &str) -> Option<u64> {
        self.counts.get(word).copied()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.counts.contains_key(word)
    }

    pub fn total_count(&self) -> u64 {
        self.total
    }

    pub fn vocabulary_size(&self) -> usize {
        self.counts.len()
    }

    /// Denominator of the smoothed unigram probability, `total + |V|`.
    pub fn smoothing_denominator(&self) -> u64 {
        self.total + self.counts.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

/// Splits a hashtag (without `#`) into dictionary words, preserving the
/// original casing of each piece.
///
/// Camel-case and letter/digit boundaries are tried first; when every
/// camel-case piece splits fully, that split wins. Otherwise the whole
/// lowercased tag is segmented. A tag with no full split comes back as a
/// single piece.
pub fn segment_hashtag(tag: &str, dict: &SegmentationDictionary) -> Vec<String> {
    let chars: Vec<char> = tag.chars().collect();
    if chars.is_empty() {
        return Vec::new();
    }
    let lower: Vec<char> = chars.iter().map(|&c| lower_char(c)).collect();
    let slice = |r: &Range<usize>| chars[r.clone()].iter().collect::<String>();

    let pieces = camel_pieces(&chars);
    if pieces.len() > 1 {
        let mut ranges = Vec::new();
        let mut complete = true;
        for piece in &pieces {
            match best_split_chars(&lower[piece.clone()], dict) {
                Some(parts) => ranges.extend(parts.into_iter().map(|r| r.start + piece.start..r.end + piece.start)),
                None => {
                    complete = false;
                    break;
                }
            }
        }
        if complete {
            return ranges.iter().map(slice).collect();
        }
    }

    match best_split_chars(&lower, dict) {
        Some(ranges) => ranges.iter().map(slice).collect(),
        None => vec![tag.to_string()],
    }
}

/// Maximum-likelihood split of an already-lowercased string into dictionary
/// words, or `None` when no full split exists.
pub fn best_split(text: &str, dict: &SegmentationDictionary) -> Option<Vec<String>> {
    let chars: Vec<char> = text.chars().collect();
    best_split_chars(&chars, dict).map(|ranges| {
        ranges
            .into_iter()
            .map(|r| chars[r].iter().collect())
            .collect()
    })
}

fn lower_char(c: char) -> char {
    let mut it = c.to_lowercase();
    match (it.next(), it.next()) {
        (Some(l), None) => l,
        _ => c,
    }
}

/// Boundaries at lower→upper, ACRONYM→Word and letter↔digit transitions.
fn camel_pieces(chars: &[char]) -> Vec<Range<usize>> {
    let mut pieces = Vec::new();
    let mut start = 0;
    for i in 1..chars.len() {
        let (a, b) = (chars[i - 1], chars[i]);
        let next_lower = chars.get(i + 1).is_some_and(|c| c.is_lowercase());
        let boundary = (a.is_lowercase() && b.is_uppercase())
            || (a.is_uppercase() && b.is_uppercase() && next_lower)
            || (a.is_alphabetic() && b.is_numeric())
            || (a.is_numeric() && b.is_alphabetic());
        if boundary {
            pieces.push(start..i);
            start = i;
        }
    }
    pieces.push(start..chars.len());
    pieces
}

/// Best split of a suffix: product of smoothed probabilities kept exactly as
/// `numerator / denominator^words`.
#[derive(Clone)]
struct Candidate {
    numerator: BigUint,
    lengths: Vec<usize>,
}

impl Candidate {
    fn words(&self) -> usize {
        self.lengths.len()
    }
}

/// Higher probability first, then fewer words, then leftmost-longest.
fn compare(a: &Candidate, b: &Candidate, denom: &BigUint) -> Ordering {
    let lhs = &a.numerator * denom.pow(b.words() as u32);
    let rhs = &b.numerator * denom.pow(a.words() as u32);
    lhs.cmp(&rhs)
        .then_with(|| b.words().cmp(&a.words()))
        .then_with(|| a.lengths.cmp(&b.lengths))
}

fn best_split_chars(text: &[char], dict: &SegmentationDictionary) -> Option<Vec<Range<usize>>> {
    let n = text.len();
    if n == 0 || dict.is_empty() {
        return None;
    }
    let denom = BigUint::from(dict.smoothing_denominator());

    // best[i] is the best split of text[i..].
    let mut best: Vec<Option<Candidate>> = vec![None; n + 1];
    best[n] = Some(Candidate {
        numerator: BigUint::from(1u32),
        lengths: Vec::new(),
    });
    let mut word = String::new();
    for start in (0..n).rev() {
        let mut winner: Option<Candidate> = None;
        word.clear();
        for end in start + 1..=n.min(start + dict.longest) {
            word.push(text[end - 1]);
            let (Some(count), Some(rest)) = (dict.count(&word), best[end].as_ref()) else {
                continue;
            };
            let mut lengths = Vec::with_capacity(rest.lengths.len() + 1);
            lengths.push(end - start);
            lengths.extend_from_slice(&rest.lengths);
            let cand = Candidate {
                numerator: &rest.numerator * BigUint::from(count + 1),
                lengths,
            };
            let better = match &winner {
                None => true,
                Some(w) => compare(&cand, w, &denom) == Ordering::Greater,
            };
            if better {
                winner = Some(cand);
            }
        }
        best[start] = winner;
    }

    let lengths = best[0].take()?.lengths;
    let mut ranges = Vec::with_capacity(lengths.len());
    let mut at = 0;
    for len in lengths {
        ranges.push(at..at + len);
        at += len;
    }
    Some(ranges)
}
