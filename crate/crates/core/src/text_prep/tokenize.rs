/// Characters split off the front of a whitespace chunk.
const LEADING: &[char] = &['(', '[', '{', '"', '\'', '“', '‘', '«', '<', '¿', '¡'];
/// Characters split off the end of a whitespace chunk.
const TRAILING: &[char] = &[
    '.', ',', ':', ';', '!', '?', ')', ']', '}', '"', '\'', '”', '’', '»', '>', '…',
];
const CLITICS: &[&str] = &["n't", "'s", "'re", "'ve", "'ll", "'d", "'m", "’s", "’re", "’ve", "’ll", "’d", "’m", "n’t"];

/// Treebank-style tokenization: whitespace split, leading and trailing
/// punctuation become their own tokens, English clitics are separated.
/// No case folding, and no character is dropped or rewritten.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        tokenize_chunk(chunk, &mut out);
    }
    out
}

/// True when the token contains at least one letter or digit.
pub fn is_word_token(token: &str) -> bool {
    token.chars().any(char::is_alphanumeric)
}

fn is_clitic(s: &str) -> bool {
    CLITICS.iter().any(|c| c.eq_ignore_ascii_case(s))
}

fn tokenize_chunk(chunk: &str, out: &mut Vec<String>) {
    if is_clitic(chunk) {
        out.push(chunk.to_string());
        return;
    }

    let mut rest = chunk;
    while let Some(c) = rest.chars().next() {
        if LEADING.contains(&c) && rest.len() > c.len_utf8() {
            out.push(c.to_string());
            rest = &rest[c.len_utf8()..];
        } else {
            break;
        }
    }

    let mut trailing = Vec::new();
    loop {
        if rest.ends_with("...") && rest.len() > 3 {
            trailing.push("...".to_string());
            rest = &rest[..rest.len() - 3];
            continue;
        }
        let Some(c) = rest.chars().next_back() else { break };
        if !TRAILING.contains(&c) || rest.len() == c.len_utf8() {
            break;
        }
        let core = &rest[..rest.len() - c.len_utf8()];
        // Abbreviations and initials keep their final period: "U.S.", "J."
        if c == '.' && (core.contains('.') || core.chars().count() == 1) {
            break;
        }
        trailing.push(c.to_string());
        rest = core;
    }

    if !rest.is_empty() {
        match split_clitic(rest) {
            Some((stem, clitic)) => {
                out.push(stem.to_string());
                out.push(clitic.to_string());
            }
            None => out.push(rest.to_string()),
        }
    }
    out.extend(trailing.into_iter().rev());
}

fn split_clitic(word: &str) -> Option<(&str, &str)> {
    let lower = word.to_lowercase();
    if lower.len() != word.len() {
        return None;
    }
    for clitic in CLITICS {
        if lower.ends_with(clitic) && word.len() > clitic.len() {
            let at = word.len() - clitic.len();
            if word.is_char_boundary(at) {
                return Some((&word[..at], &word[at..]));
            }
        }
    }
    None
}
