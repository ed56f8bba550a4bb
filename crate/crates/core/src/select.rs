//! Evidence sentence selection by triple-word overlap with the rumour.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeSet, BinaryHeap, HashMap};
use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::retrieval::ArticleDoc;
use crate::stopwords;
use crate::text_prep::{is_word_token, tokenize, PreprocessedTweet};

#[derive(Debug, Error)]
pub enum SelectError {
    #[error("only {} sentences scored above zero", selected.len())]
    InsufficientEvidence { selected: Vec<ScoredSentence> },
    #[error("invalid selection config: {0}")]
    InvalidConfig(String),
    #[error("no non-empty articles to select from")]
    NoArticles,
    #[error("triple table line {line}: {reason}")]
    MalformedTriples { line: usize, reason: String },
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionConfig {
    pub min_len: usize,
    pub max_len: usize,
    pub penalty_per_word: f64,
    pub top_k: usize,
    pub stopwords: BTreeSet<String>,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            min_len: 5,
            max_len: 20,
            penalty_per_word: 0.02,
            top_k: 5,
            stopwords: stopwords::english(),
        }
    }
}

impl SelectionConfig {
    pub fn validate(&self) -> Result<(), SelectError> {
        if self.min_len == 0 || self.min_len >= self.max_len {
            return Err(SelectError::InvalidConfig(format!(
                "need 0 < min_len < max_len, got {} and {}",
                self.min_len, self.max_len
            )));
        }
        if !(0.0..1.0).contains(&self.penalty_per_word) {
            return Err(SelectError::InvalidConfig(format!("penalty_per_word {} outside [0, 1)", self.penalty_per_word)));
        }
        if self.top_k == 0 {
            return Err(SelectError::InvalidConfig("top_k must be at least 1".into()));
        }
        Ok(())
    }

    /// Overlap after the length rule: 0 below `min_len`, linear decay above `max_len`.
    pub fn penalized(&self, raw_overlap: usize, len: usize) -> f64 {
        if len < self.min_len {
            return 0.0;
        }
        let raw = raw_overlap as f64;
        if len > self.max_len {
            raw * (1.0 - self.penalty_per_word * (len - self.max_len) as f64).max(0.0)
        } else {
            raw
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredSentence {
    pub text: String,
    pub tokens: Vec<String>,
    pub source_url: String,
    pub article_rank: usize,
    /// Sentence index within the article's paragraphs, from 0.
    pub position_in_article: usize,
    pub raw_overlap: usize,
    pub final_score: f64,
}

/// Words a sentence's subject/predicate/object spans cover.
pub trait TripleWords: Sync {
    fn words(&self, sentence: &str, tokens: &[String]) -> Vec<String>;
}

/// Treats every word of the sentence as covered; for when no extractor output exists.
#[derive(Debug, Clone, Copy, Default)]
pub struct AllWords;

impl TripleWords for AllWords {
    fn words(&self, _sentence: &str, tokens: &[String]) -> Vec<String> {
        tokens.to_vec()
    }
}

/// Extractor output keyed by sentence text. Sentences absent from the table have no words.
#[derive(Debug, Clone, Default)]
pub struct TripleTable {
    spans: HashMap<String, Vec<String>>,
}

impl TripleTable {
    pub fn insert(&mut self, sentence: &str, subject: &str, predicate: &str, object: &str) {
        let entry = self.spans.entry(normalize_space(sentence)).or_default();
        for span in [subject, predicate, object] {
            entry.extend(tokenize(span));
        }
    }

    /// Lines of `sentence<TAB>subject<TAB>predicate<TAB>object`; the object may be empty.
    pub fn from_reader(reader: impl BufRead) -> Result<Self, SelectError> {
        let mut table = Self::default();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if !(3..=4).contains(&fields.len()) {
                return Err(SelectError::MalformedTriples {
                    line: i + 1,
                    reason: format!("expected 3 or 4 tab-separated fields, found {}", fields.len()),
                });
            }
            table.insert(fields[0], fields[1], fields[2], fields.get(3).copied().unwrap_or(""));
        }
        Ok(table)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, SelectError> {
        let file = std::fs::File::open(path)?;
        Self::from_reader(std::io::BufReader::new(file))
    }

    pub fn len(&self) -> usize {
        self.spans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }
}

impl TripleWords for TripleTable {
    fn words(&self, sentence: &str, _tokens: &[String]) -> Vec<String> {
        self.spans.get(&normalize_space(sentence)).cloned().unwrap_or_default()
    }
}

fn normalize_space(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

const ABBREVIATIONS: &[&str] = &[
    "mr", "mrs", "ms", "dr", "prof", "st", "jr", "sr", "gen", "col", "lt", "sgt", "capt", "cpt", "gov", "sen", "rep", "rev",
    "hon", "insp", "supt", "det", "cmdr", "maj", "adm", "pres", "inc", "ltd", "co", "corp", "vs", "no", "nos", "etc", "approx",
    "dept", "est", "fig", "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept", "oct", "nov", "dec", "mon", "tue",
    "wed", "thu", "fri", "sat", "sun", "u.s", "u.k", "u.n", "e.g", "i.e", "a.m", "p.m", "mt", "ft", "ave", "blvd",
];

fn is_closer(c: char) -> bool {
    matches!(c, '"' | '\'' | ')' | ']' | '”' | '’' | '»')
}

fn is_opener(c: char) -> bool {
    c.is_uppercase() || c.is_ascii_digit() || matches!(c, '"' | '\'' | '“' | '‘' | '(' | '[' | '«')
}

/// Splits on `.`, `!` or `?` (plus closing quotes or brackets) followed by
/// whitespace and an uppercase letter, digit or opening quote. A period
/// after a listed abbreviation or a single-letter initial does not split.
pub fn split_sentences(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut sentences = Vec::new();
    let mut start = 0;
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if matches!(c, '.' | '!' | '?') {
            let mut end = i + 1;
            while end < chars.len() && (matches!(chars[end], '.' | '!' | '?') || is_closer(chars[end])) {
                end += 1;
            }
            let mut next = end;
            while next < chars.len() && chars[next].is_whitespace() {
                next += 1;
            }
            let boundary = next > end && next < chars.len() && is_opener(chars[next]);
            if boundary && !(c == '.' && end == i + 1 && is_abbreviation(&chars[start..i])) {
                push_trimmed(&chars[start..end], &mut sentences);
                start = next;
                i = next;
                continue;
            }
            i = end;
            continue;
        }
        i += 1;
    }
    push_trimmed(&chars[start..], &mut sentences);
    sentences
}

fn is_abbreviation(before: &[char]) -> bool {
    let word: String = before
        .iter()
        .rev()
        .take_while(|c| !c.is_whitespace() && !matches!(c, '(' | '"' | '“'))
        .collect::<Vec<_>>()
        .into_iter()
        .rev()
        .collect();
    let lower = word.to_lowercase();
    if ABBREVIATIONS.contains(&lower.as_str()) {
        return true;
    }
    let mut letters = word.chars();
    matches!((letters.next(), letters.next()), (Some(ch), None) if ch.is_uppercase())
}

fn push_trimmed(chars: &[char], out: &mut Vec<String>) {
    let s: String = chars.iter().collect();
    let s = s.trim();
    if !s.is_empty() {
        out.push(s.to_string());
    }
}

/// Candidate sentence before ranking.
struct Candidate {
    sentence: ScoredSentence,
    article_index: usize,
}

impl Candidate {
    /// Greater means better: score, then earlier article, earlier position.
    fn rank_cmp(&self, other: &Self) -> Ordering {
        self.sentence
            .final_score
            .total_cmp(&other.sentence.final_score)
            .then_with(|| other.sentence.article_rank.cmp(&self.sentence.article_rank))
            .then_with(|| other.sentence.position_in_article.cmp(&self.sentence.position_in_article))
            .then_with(|| other.article_index.cmp(&self.article_index))
    }
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.rank_cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank_cmp(other)
    }
}

/// Scores one sentence against the rumour's lowercased word types.
pub fn score_sentence(
    text: &str,
    rumour_words: &BTreeSet<String>,
    triples: &dyn TripleWords,
    cfg: &SelectionConfig,
) -> (Vec<String>, usize, f64) {
    let tokens = tokenize(text);
    let len = tokens.iter().filter(|t| is_word_token(t)).count();
    let important: BTreeSet<String> = triples
        .words(text, &tokens)
        .iter()
        .filter(|w| is_word_token(w))
        .map(|w| w.to_lowercase())
        .filter(|w| !cfg.stopwords.contains(w))
        .collect();
    let raw = important.intersection(rumour_words).count();
    let score = cfg.penalized(raw, len);
    (tokens, raw, score)
}

/// Picks the `top_k` best sentences with positive score across the articles.
///
/// Returns `InsufficientEvidence` carrying the partial list when fewer than
/// `top_k` sentences score above zero.
pub fn select_sentences(
    rumour: &PreprocessedTweet,
    articles: &[ArticleDoc],
    triples: &dyn TripleWords,
    cfg: &SelectionConfig,
) -> Result<Vec<ScoredSentence>, SelectError> {
    cfg.validate()?;
    if articles.iter().all(|a| a.is_empty) {
        return Err(SelectError::NoArticles);
    }
    let rumour_words: BTreeSet<String> = rumour
        .tokens
        .iter()
        .filter(|t| is_word_token(t))
        .map(|t| t.to_lowercase())
        .collect();

    // min-heap of the best `top_k` so far
    let mut heap: BinaryHeap<Reverse<Candidate>> = BinaryHeap::with_capacity(cfg.top_k + 1);
    for (article_index, article) in articles.iter().enumerate().filter(|(_, a)| !a.is_empty) {
        let sentences = article.paragraphs.iter().flat_map(|p| split_sentences(p));
        for (position, text) in sentences.enumerate() {
            let (tokens, raw_overlap, final_score) = score_sentence(&text, &rumour_words, triples, cfg);
            if final_score <= 0.0 {
                continue;
            }
            let candidate = Candidate {
                sentence: ScoredSentence {
                    text,
                    tokens,
                    source_url: article.url.clone(),
                    article_rank: article.retrieved_rank,
                    position_in_article: position,
                    raw_overlap,
                    final_score,
                },
                article_index,
            };
            if heap.len() < cfg.top_k {
                heap.push(Reverse(candidate));
            } else if heap.peek().is_some_and(|worst| candidate > worst.0) {
                heap.pop();
                heap.push(Reverse(candidate));
            }
        }
    }
    let selected: Vec<ScoredSentence> = heap.into_sorted_vec().into_iter().map(|Reverse(c)| c.sentence).collect();
    if selected.len() < cfg.top_k {
        return Err(SelectError::InsufficientEvidence { selected });
    }
    Ok(selected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::{DateTime, NaiveDate};

    fn rumour(text: &str) -> PreprocessedTweet {
        PreprocessedTweet {
            source_id: "1".into(),
            tokens: tokenize(text),
            extracted_urls: vec![],
            mentions: vec![],
            trailing_hashtags: vec![],
            inner_hashtag_tokens: vec![],
            date_cutoff: NaiveDate::from_ymd_opt(2015, 1, 9).unwrap(),
        }
    }

    fn article(rank: usize, paragraphs: &[&str]) -> ArticleDoc {
        ArticleDoc::new(
            format!("https://example.org/{rank}"),
            "Title".into(),
            paragraphs.iter().map(|p| p.to_string()).collect(),
            rank,
            DateTime::UNIX_EPOCH,
        )
    }

    #[test]
    fn penalty_spot_check() {
        let cfg = SelectionConfig::default();
        assert!((cfg.penalized(10, 22) - 9.6).abs() < 1e-12);
        assert_eq!(cfg.penalized(10, 20), 10.0);
        assert_eq!(cfg.penalized(10, 4), 0.0);
        assert_eq!(cfg.penalized(10, 5), 10.0);
        assert_eq!(cfg.penalized(10, 70), 0.0);
        assert_eq!(cfg.penalized(10, 200), 0.0);
    }

    #[test]
    fn splits_sentences_with_abbreviations() {
        let s = split_sentences("Mr. Smith arrived at 9 a.m. on Friday. Police said \"no comment.\" Then U.S. officials left! What next? 3 dead.");
        assert_eq!(
            s,
            vec![
                "Mr. Smith arrived at 9 a.m. on Friday.",
                "Police said \"no comment.\"",
                "Then U.S. officials left!",
                "What next?",
                "3 dead.",
            ]
        );
        assert_eq!(split_sentences("J. K. Rowling wrote it. ok then."), vec!["J. K. Rowling wrote it. ok then."]);
    }

    #[test]
    fn short_sentences_are_excluded() {
        let cfg = SelectionConfig { top_k: 1, ..SelectionConfig::default() };
        let a = article(1, &["Hostages taken in Paris."]);
        let r = select_sentences(&rumour("hostages taken in Paris"), &[a], &AllWords, &cfg);
        match r {
            Err(SelectError::InsufficientEvidence { selected }) => assert!(selected.is_empty()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn ranks_by_score_then_article_then_position() {
        let cfg = SelectionConfig { top_k: 3, ..SelectionConfig::default() };
        let a1 = article(2, &["Police say suspects hold hostages near Paris today. The suspects fled north in a car."]);
        let a2 = article(1, &["The suspects fled north in a stolen car. Suspects hold hostages in a print works near Paris."]);
        let r = rumour("suspects hold hostages near Paris");
        let out = select_sentences(&r, &[a1, a2], &AllWords, &cfg).unwrap();
        let keys: Vec<(usize, usize, usize)> = out.iter().map(|s| (s.article_rank, s.position_in_article, s.raw_overlap)).collect();
        assert_eq!(keys, vec![(1, 1, 5), (2, 0, 5), (1, 0, 1)]);
    }

    #[test]
    fn overlap_counts_types_and_skips_stopwords() {
        let cfg = SelectionConfig::default();
        let words: BTreeSet<String> = ["the", "siege", "cafe"].iter().map(|s| s.to_string()).collect();
        let (_, raw, _) = score_sentence("The siege the siege at the cafe ended", &words, &AllWords, &cfg);
        assert_eq!(raw, 2);
    }

    #[test]
    fn triple_table_limits_important_words() {
        let mut table = TripleTable::default();
        table.insert("Gunman holds hostages in a Sydney cafe.", "Gunman", "holds", "hostages");
        let cfg = SelectionConfig { top_k: 1, ..SelectionConfig::default() };
        let a = article(1, &["Gunman holds hostages in a Sydney cafe."]);
        let out = select_sentences(&rumour("hostages held in Sydney cafe"), &[a], &table, &cfg).unwrap();
        assert_eq!(out[0].raw_overlap, 1);
        let parsed = TripleTable::from_reader("s\ta\tb\tc\nt\ta\tb\n".as_bytes()).unwrap();
        assert_eq!(parsed.len(), 2);
        assert!(TripleTable::from_reader("only\ttwo\n".as_bytes()).is_err());
    }

    #[test]
    fn invalid_configs_are_rejected() {
        for cfg in [
            SelectionConfig { min_len: 0, ..SelectionConfig::default() },
            SelectionConfig { min_len: 20, ..SelectionConfig::default() },
            SelectionConfig { penalty_per_word: 1.0, ..SelectionConfig::default() },
            SelectionConfig { top_k: 0, ..SelectionConfig::default() },
        ] {
            assert!(matches!(cfg.validate(), Err(SelectError::InvalidConfig(_))));
        }
    }
}
