use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::conllu::{ParseToken, ParsedSentence};
use super::ParseIngestError;

/// A clause as token indices into one sentence. The three lists are sorted
/// and pairwise disjoint; the object may be empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triple {
    pub subject: Vec<usize>,
    pub predicate: Vec<usize>,
    pub object: Vec<usize>,
}

impl Triple {
    /// All indices of the triple, sorted and deduplicated.
    pub fn indices(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self
            .subject
            .iter()
            .chain(&self.predicate)
            .chain(&self.object)
            .copied()
            .collect();
        all.sort_unstable();
        all.dedup();
        all
    }

    pub fn is_well_formed(&self, sentence_len: usize) -> bool {
        let sorted = |v: &[usize]| v.windows(2).all(|w| w[0] < w[1]);
        let in_range = |v: &[usize]| v.iter().all(|&i| i >= 1 && i <= sentence_len);
        let parts = [&self.subject, &self.predicate, &self.object];
        !self.subject.is_empty()
            && !self.predicate.is_empty()
            && parts.iter().all(|p| sorted(p) && in_range(p))
            && self.indices().len() == self.subject.len() + self.predicate.len() + self.object.len()
    }
}

const SUBJECT_RELATIONS: [&str; 2] = ["nsubj", "nsubj:pass"];
const PREDICATE_RELATIONS: [&str; 4] = ["aux", "aux:pass", "cop", "compound:prt"];
/// Object-like dependents, matched on the universal part of the relation
/// (`obl:npmod` counts as `obl`).
const OBJECT_RELATIONS: [&str; 5] = ["obj", "iobj", "ccomp", "xcomp", "obl"];
/// Subtrees never folded into a span: punctuation, coordinators and clauses
/// that form triples of their own.
const SPAN_BREAKS: [&str; 4] = ["punct", "cc", "acl:relcl", "parataxis"];

fn base_relation(deprel: &str) -> &str {
    deprel.split(':').next().unwrap_or(deprel)
}

fn is_clause_head(sentence: &ParsedSentence, token: &ParseToken) -> bool {
    token.upos == "VERB" || sentence.children(token.index).any(|c| c.deprel == "cop")
}

/// Indices of the subtree rooted at `index`, minus span-breaking subtrees.
fn span(sentence: &ParsedSentence, index: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut stack = vec![index];
    while let Some(at) = stack.pop() {
        out.push(at);
        for child in sentence.children(at) {
            if !SPAN_BREAKS.contains(&child.deprel.as_str()) {
                stack.push(child.index);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Heuristic clause extraction over a dependency parse.
///
/// Each verb (or copular head) with a nominal subject yields one triple per
/// object-like dependent, or a single triple with an empty object when it has
/// none. Relative clauses are separate clauses and are left out of the spans
/// of the clause containing them.
pub fn extract_triples(sentence: &ParsedSentence) -> Vec<Triple> {
    let mut triples = Vec::new();
    for head in sentence.tokens() {
        if !is_clause_head(sentence, head) {
            continue;
        }
        let children: Vec<&ParseToken> = sentence.children(head.index).collect();
        let mut subject: Vec<usize> = children
            .iter()
            .filter(|c| SUBJECT_RELATIONS.contains(&c.deprel.as_str()))
            .flat_map(|c| span(sentence, c.index))
            .collect();
        if subject.is_empty() {
            continue;
        }
        subject.sort_unstable();

        let mut predicate: Vec<usize> = std::iter::once(head.index)
            .chain(
                children
                    .iter()
                    .filter(|c| PREDICATE_RELATIONS.contains(&c.deprel.as_str()))
                    .map(|c| c.index),
            )
            .collect();
        predicate.sort_unstable();

        let objects: Vec<Vec<usize>> = children
            .iter()
            .filter(|c| OBJECT_RELATIONS.contains(&base_relation(&c.deprel)))
            .map(|c| span(sentence, c.index))
            .collect();
        if objects.is_empty() {
            triples.push(Triple {
                subject,
                predicate,
                object: Vec::new(),
            });
        } else {
            for object in objects {
                triples.push(Triple {
                    subject: subject.clone(),
                    predicate: predicate.clone(),
                    object,
                });
            }
        }
    }
    triples
}

/// Triples read from a TSV file, with one error per rejected line.
#[derive(Debug, Default)]
pub struct TripleBatch {
    pub triples: BTreeMap<String, Vec<Triple>>,
    pub errors: Vec<ParseIngestError>,
}

/// Parses `id<TAB>subject<TAB>predicate<TAB>object` lines and maps each span
/// back onto token indices of the sentence with that id.
pub fn parse_triples_tsv(text: &str, parses: &BTreeMap<String, ParsedSentence>) -> TripleBatch {
    let mut batch = TripleBatch::default();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if !(3..=4).contains(&fields.len()) {
            batch.errors.push(ParseIngestError::MalformedTriple {
                line: line_no,
                reason: format!("expected 4 tab-separated fields, found {}", fields.len()),
            });
            continue;
        }
        let id = fields[0].trim();
        let Some(sentence) = parses.get(id) else {
            batch.errors.push(ParseIngestError::UnknownSentence {
                line: line_no,
                id: id.to_string(),
            });
            continue;
        };
        let object = fields.get(3).copied().unwrap_or("");
        match match_triple(sentence, fields[1], fields[2], object) {
            Ok(triple) => batch.triples.entry(id.to_string()).or_default().push(triple),
            Err(field) => batch.errors.push(ParseIngestError::SpanNotFound {
                id: id.to_string(),
                field: field.to_string(),
            }),
        }
    }
    batch
}

fn match_triple(
    sentence: &ParsedSentence,
    subject: &str,
    predicate: &str,
    object: &str,
) -> Result<Triple, &'static str> {
    let mut used = vec![false; sentence.len() + 1];
    let mut take = |text: &str, field: &'static str, required: bool| {
        let words: Vec<&str> = text.split_whitespace().collect();
        if words.is_empty() {
            return if required { Err(field) } else { Ok(Vec::new()) };
        }
        match_span(sentence, &words, &mut used).ok_or(field)
    };
    let subject = take(subject, "subject", true)?;
    let predicate = take(predicate, "predicate", true)?;
    let object = take(object, "object", false)?;
    Ok(Triple {
        subject,
        predicate,
        object,
    })
}

/// Greedy longest-contiguous matching: repeatedly find the longest run of the
/// remaining span words that appears contiguously among unused tokens
/// (earliest occurrence wins), claim it, and continue with what is left.
fn match_span(sentence: &ParsedSentence, words: &[&str], used: &mut [bool]) -> Option<Vec<usize>> {
    let tokens = sentence.tokens();
    let same = |t: &ParseToken, w: &str| t.surface == w || t.surface.to_lowercase() == w.to_lowercase();
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < words.len() {
        let mut best: Option<(usize, usize)> = None; // (start, len)
        for start in 0..tokens.len() {
            let mut len = 0;
            while pos + len < words.len()
                && start + len < tokens.len()
                && !used[tokens[start + len].index]
                && same(&tokens[start + len], words[pos + len])
            {
                len += 1;
            }
            if len > 0 && best.is_none_or(|(_, l)| len > l) {
                best = Some((start, len));
            }
        }
        let (start, len) = best?;
        for t in &tokens[start..start + len] {
            used[t.index] = true;
            out.push(t.index);
        }
        pos += len;
    }
    out.sort_unstable();
    Some(out)
}

/// Reads a triple TSV file, failing on the first bad line.
pub fn read_triples(
    path: impl AsRef<Path>,
    parses: &BTreeMap<String, ParsedSentence>,
) -> Result<BTreeMap<String, Vec<Triple>>, ParseIngestError> {
    let mut batch = read_triples_lenient(path, parses)?;
    if batch.errors.is_empty() {
        Ok(batch.triples)
    } else {
        Err(batch.errors.swap_remove(0))
    }
}

pub fn read_triples_lenient(
    path: impl AsRef<Path>,
    parses: &BTreeMap<String, ParsedSentence>,
) -> Result<TripleBatch, ParseIngestError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ParseIngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(parse_triples_tsv(&text, parses))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse_ingest::parse_conllu;

    const POLICE: &str = "# sent_id = t1\n\
        1\tPolice\tpolice\tNOUN\t_\t_\t2\tnsubj\t_\t_\n\
        2\tarrested\tarrest\tVERB\t_\t_\t0\troot\t_\t_\n\
        3\ttwo\ttwo\tNUM\t_\t_\t4\tnummod\t_\t_\n\
        4\tsuspects\tsuspect\tNOUN\t_\t_\t2\tobj\t_\t_\n";

    fn parses(text: &str) -> BTreeMap<String, ParsedSentence> {
        let batch = parse_conllu(text);
        assert!(batch.errors.is_empty(), "{:?}", batch.errors);
        batch.sentences
    }

    #[test]
    fn single_clause() {
        let p = parses(POLICE);
        let triples = extract_triples(&p["t1"]);
        assert_eq!(
            triples,
            vec![Triple {
                subject: vec![1],
                predicate: vec![2],
                object: vec![3, 4]
            }]
        );
    }

    #[test]
    fn verbless_sentence_has_no_triples() {
        let p = parses(
            "# sent_id = b\n\
            1\tBreaking\tbreaking\tADJ\t_\t_\t2\tamod\t_\t_\n\
            2\tnews\tnews\tNOUN\t_\t_\t0\troot\t_\t_\n\
            3\t!\t!\tPUNCT\t_\t_\t2\tpunct\t_\t_\n",
        );
        assert!(extract_triples(&p["b"]).is_empty());
    }

    #[test]
    fn copular_clause_and_intransitive() {
        let p = parses(
            "# sent_id = c\n\
            1\tThe\tthe\tDET\t_\t_\t2\tdet\t_\t_\n\
            2\tsiege\tsiege\tNOUN\t_\t_\t4\tnsubj\t_\t_\n\
            3\tis\tbe\tAUX\t_\t_\t4\tcop\t_\t_\n\
            4\tover\tover\tADV\t_\t_\t0\troot\t_\t_\n",
        );
        let t = extract_triples(&p["c"]);
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].subject, vec![1, 2]);
        assert_eq!(t[0].predicate, vec![3, 4]);
        assert!(t[0].object.is_empty());
        assert!(t[0].is_well_formed(4));
    }

    #[test]
    fn tsv_line_maps_onto_indices() {
        let p = parses(POLICE);
        let batch = parse_triples_tsv("t1\tPolice\tarrested\ttwo suspects\n", &p);
        assert!(batch.errors.is_empty());
        assert_eq!(
            batch.triples["t1"],
            vec![Triple {
                subject: vec![1],
                predicate: vec![2],
                object: vec![3, 4]
            }]
        );
    }

    #[test]
    fn absent_word_is_span_not_found() {
        let p = parses(POLICE);
        let batch = parse_triples_tsv("t1\tPolice\tarrested\ttank\n", &p);
        assert!(matches!(
            &batch.errors[..],
            [ParseIngestError::SpanNotFound { id, field }] if id == "t1" && field == "object"
        ));
    }

    #[test]
    fn non_contiguous_span_matches_in_pieces() {
        let p = parses(POLICE);
        let batch = parse_triples_tsv("t1\tPolice suspects\tarrested\t\n", &p);
        assert!(batch.errors.is_empty(), "{:?}", batch.errors);
        assert_eq!(batch.triples["t1"][0].subject, vec![1, 4]);
        assert!(batch.triples["t1"][0].object.is_empty());
    }

    #[test]
    fn unknown_sentence_is_reported() {
        let p = parses(POLICE);
        let batch = parse_triples_tsv("zz\tPolice\tarrested\tsuspects\n", &p);
        assert!(matches!(batch.errors[..], [ParseIngestError::UnknownSentence { line: 1, .. }]));
    }
}
