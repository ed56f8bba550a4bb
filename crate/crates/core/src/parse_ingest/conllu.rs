use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ParseIngestError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseToken {
    pub index: usize,
    pub surface: String,
    pub lemma: String,
    pub upos: String,
    /// 0 for the root.
    pub head: usize,
    pub deprel: String,
}

/// A validated dependency tree: indices `1..=n`, one root, no cycles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedSentence {
    pub sentence_id: String,
    tokens: Vec<ParseToken>,
}

impl ParsedSentence {
    /// Validates the head graph. `line` offsets are not known here, so errors
    /// report line 0; the CoNLL-U reader reports real line numbers.
    pub fn new(sentence_id: impl Into<String>, tokens: Vec<ParseToken>) -> Result<Self, ParseIngestError> {
        validate(&tokens).map_err(|(pos, reason)| ParseIngestError::MalformedParse {
            line: pos.map_or(0, |p| p + 1),
            reason,
        })?;
        Ok(Self {
            sentence_id: sentence_id.into(),
            tokens,
        })
    }

    pub fn tokens(&self) -> &[ParseToken] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Token by 1-based index.
    pub fn token(&self, index: usize) -> &ParseToken {
        &self.tokens[index - 1]
    }

    pub fn root(&self) -> &ParseToken {
        self.tokens.iter().find(|t| t.head == 0).expect("validated")
    }

    pub fn children(&self, index: usize) -> impl Iterator<Item = &ParseToken> {
        self.tokens.iter().filter(move |t| t.head == index)
    }

    pub fn surfaces(&self, indices: &[usize]) -> Vec<String> {
        indices.iter().map(|&i| self.token(i).surface.clone()).collect()
    }
}

/// Checks index contiguity, head range, single root and acyclicity.
/// Errors carry the offending token's position within the block.
fn validate(tokens: &[ParseToken]) -> Result<(), (Option<usize>, String)> {
    let n = tokens.len();
    if n == 0 {
        return Err((None, "sentence has no tokens".into()));
    }
    for (pos, t) in tokens.iter().enumerate() {
        if t.index != pos + 1 {
            return Err((Some(pos), format!("token index {} out of sequence (expected {})", t.index, pos + 1)));
        }
        if t.head > n {
            return Err((Some(pos), format!("head {} out of range for {n}-token sentence", t.head)));
        }
        if t.head == t.index {
            return Err((Some(pos), format!("token {} is its own head", t.index)));
        }
        if t.deprel.is_empty() || t.deprel == "_" {
            return Err((Some(pos), format!("token {} has no dependency relation", t.index)));
        }
    }
    let roots: Vec<usize> = tokens.iter().enumerate().filter(|(_, t)| t.head == 0).map(|(p, _)| p).collect();
    match roots.len() {
        1 => {}
        0 => return Err((None, "no root token".into())),
        _ => return Err((Some(roots[1]), format!("{} root tokens", roots.len()))),
    }
    // Every chain of heads must reach the root within n steps.
    for (pos, t) in tokens.iter().enumerate() {
        let mut at = t.head;
        let mut steps = 0;
        while at != 0 {
            steps += 1;
            if steps > n {
                return Err((Some(pos), format!("cycle through token {}", t.index)));
            }
            at = tokens[at - 1].head;
        }
    }
    Ok(())
}

/// Result of reading a CoNLL-U document: the sentences that validated and one
/// error per rejected block.
#[derive(Debug, Default)]
pub struct ParseBatch {
    pub sentences: BTreeMap<String, ParsedSentence>,
    pub errors: Vec<ParseIngestError>,
}

struct Block {
    first_line: usize,
    id: Option<String>,
    rows: Vec<(usize, String)>,
}

/// Parses CoNLL-U text. Multiword ranges (`1-2`) and empty nodes (`1.1`) are
/// skipped. Sentence ids come from `# sent_id = ...` comments.
pub fn parse_conllu(text: &str) -> ParseBatch {
    let mut batch = ParseBatch::default();
    let mut block: Option<Block> = None;

    let finish = |block: Option<Block>, batch: &mut ParseBatch| {
        let Some(block) = block else { return };
        if block.rows.is_empty() {
            return;
        }
        match build_sentence(block) {
            Ok(sentence) => {
                let id = sentence.sentence_id.clone();
                if batch.sentences.contains_key(&id) {
                    batch.errors.push(ParseIngestError::MalformedParse {
                        line: 0,
                        reason: format!("duplicate sentence id `{id}`"),
                    });
                } else {
                    batch.sentences.insert(id, sentence);
                }
            }
            Err(e) => batch.errors.push(e),
        }
    };

    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let trimmed = line.trim_end_matches('\r');
        if trimmed.trim().is_empty() {
            finish(block.take(), &mut batch);
            continue;
        }
        let b = block.get_or_insert_with(|| Block {
            first_line: line_no,
            id: None,
            rows: Vec::new(),
        });
        if let Some(comment) = trimmed.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once('=') {
                if key.trim() == "sent_id" {
                    b.id = Some(value.trim().to_string());
                }
            }
            continue;
        }
        b.rows.push((line_no, trimmed.to_string()));
    }
    finish(block.take(), &mut batch);
    batch
}

fn build_sentence(block: Block) -> Result<ParsedSentence, ParseIngestError> {
    let malformed = |line: usize, reason: String| ParseIngestError::MalformedParse { line, reason };
    let id = block
        .id
        .ok_or_else(|| malformed(block.first_line, "missing `# sent_id` comment".into()))?;

    let mut tokens = Vec::with_capacity(block.rows.len());
    let mut lines = Vec::with_capacity(block.rows.len());
    for (line_no, row) in &block.rows {
        let mut cols: Vec<&str> = row.split('\t').collect();
        if cols.len() != 10 {
            cols = row.split_whitespace().collect();
        }
        if cols.len() != 10 {
            return Err(malformed(*line_no, format!("expected 10 columns, found {}", cols.len())));
        }
        if cols[0].contains('-') || cols[0].contains('.') {
            continue;
        }
        let index: usize = cols[0]
            .parse()
            .map_err(|_| malformed(*line_no, format!("bad token index `{}`", cols[0])))?;
        let head: usize = cols[6]
            .parse()
            .map_err(|_| malformed(*line_no, format!("bad head `{}`", cols[6])))?;
        if let Some(prev) = tokens.last().map(|t: &ParseToken| t.index) {
            if index <= prev {
                return Err(malformed(*line_no, format!("duplicated or decreasing token index {index}")));
            }
        }
        tokens.push(ParseToken {
            index,
            surface: cols[1].to_string(),
            lemma: cols[2].to_string(),
            upos: cols[3].to_string(),
            head,
            deprel: cols[7].to_string(),
        });
        lines.push(*line_no);
    }

    validate(&tokens).map_err(|(pos, reason)| {
        let line = pos.map_or(block.first_line, |p| lines[p]);
        malformed(line, format!("sentence `{id}`: {reason}"))
    })?;
    Ok(ParsedSentence { sentence_id: id, tokens })
}

/// Reads a CoNLL-U file, failing on the first malformed block.
pub fn read_parses(path: impl AsRef<Path>) -> Result<BTreeMap<String, ParsedSentence>, ParseIngestError> {
    let mut batch = read_parses_lenient(path)?;
    if batch.errors.is_empty() {
        Ok(batch.sentences)
    } else {
        Err(batch.errors.swap_remove(0))
    }
}

/// Reads a CoNLL-U file, keeping well-formed sentences and reporting the rest.
pub fn read_parses_lenient(path: impl AsRef<Path>) -> Result<ParseBatch, ParseIngestError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ParseIngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(parse_conllu(&text))
}
