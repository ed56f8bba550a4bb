use super::conllu::{ParseToken, ParsedSentence};

/// Relations whose tokens are kept when shortening a query.
pub const QUERY_RELATIONS: [&str; 9] = [
    "obl:npmod",
    "compound",
    "advcl",
    "nummod",
    "acl:relcl",
    "nsubj:pass",
    "acl",
    "amod",
    "aux:pass",
];

/// A retained token with one of these relations also keeps its head, so a
/// modifier never appears without the word it modifies.
pub const MODIFIER_HEAD_RELATIONS: [&str; 3] = ["compound", "amod", "nummod"];

/// Tokens whose relation is in `relations`, plus the heads of retained
/// modifiers, in sentence order.
pub fn retain_by_deprel<'a, S: AsRef<str>>(sentence: &'a ParsedSentence, relations: &[S]) -> Vec<&'a ParseToken> {
    let wanted = |rel: &str| relations.iter().any(|r| r.as_ref() == rel);
    let mut keep = vec![false; sentence.len() + 1];
    for t in sentence.tokens() {
        if wanted(&t.deprel) {
            keep[t.index] = true;
            if t.head != 0 && MODIFIER_HEAD_RELATIONS.contains(&t.deprel.as_str()) {
                keep[t.head] = true;
            }
        }
    }
    sentence.tokens().iter().filter(|t| keep[t.index]).collect()
}
