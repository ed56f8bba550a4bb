use chrono::NaiveDate;
use once_cell::sync::Lazy;
use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::tokenize::tokenize;
use crate::types::Event;

/// URLs as they appear in tweet text.
pub const URL_PATTERN: &str = r"(?i)(?:https?://|www\.)\S+";

static URL_RE: Lazy<Regex> = Lazy::new(|| Regex::new(URL_PATTERN).unwrap());
static MENTION_RE: Lazy<Regex> = Lazy::new(|| Regex::new(r"@\w*").unwrap());
static HASHTAG_TOKEN_RE: Lazy<Regex> = Lazy::new(|| Regex::new(r"^#\w+$").unwrap());

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TextPrepError {
    #[error("tweet {id} has no text left after cleaning")]
    EmptyTweet { id: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawTweet {
    pub id: String,
    pub text: String,
    pub created_at: NaiveDate,
    pub event: Event,
    pub author_handle: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreprocessedTweet {
    pub source_id: String,
    pub tokens: Vec<String>,
    pub extracted_urls: Vec<String>,
    /// Removed `@handle` strings, in order; each left a `user` token behind.
    pub mentions: Vec<String>,
    /// Hashtags from the end of the tweet, without `#`.
    pub trailing_hashtags: Vec<String>,
    /// Positions in `tokens` of hashtags kept mid-text (with `#` stripped).
    pub inner_hashtag_tokens: Vec<usize>,
    pub date_cutoff: NaiveDate,
}

/// Normalises a tweet for querying.
///
/// URLs are removed and kept aside, `@handle` becomes `user`, the run of
/// hashtags closing the tweet (judged after URL removal) is moved to
/// `trailing_hashtags`, and remaining hashtags lose their `#` in place.
pub fn preprocess(raw: &RawTweet) -> Result<PreprocessedTweet, TextPrepError> {
    let empty = || TextPrepError::EmptyTweet { id: raw.id.clone() };
    if raw.text.trim().is_empty() {
        return Err(empty());
    }

    let mut extracted_urls = Vec::new();
    let without_urls = URL_RE.replace_all(&raw.text, |caps: &regex::Captures| {
        extracted_urls.push(caps[0].to_string());
        " "
    });

    let mut mentions = Vec::new();
    let mut text = String::with_capacity(without_urls.len());
    let mut last = 0;
    for m in MENTION_RE.find_iter(&without_urls) {
        // "a@b.com" is not a mention, nor is "#@x".
        let prev = without_urls[..m.start()].chars().next_back();
        if prev.is_some_and(|c| c.is_alphanumeric() || c == '_' || c == '#') {
            continue;
        }
        text.push_str(&without_urls[last..m.start()]);
        text.push_str("user");
        mentions.push(m.as_str().to_string());
        last = m.end();
    }
    text.push_str(&without_urls[last..]);

    let chunks: Vec<&str> = text.split_whitespace().collect();
    let trailing_from = chunks
        .iter()
        .rposition(|c| !HASHTAG_TOKEN_RE.is_match(c))
        .map_or(0, |i| i + 1);
    let trailing_hashtags = chunks[trailing_from..]
        .iter()
        .map(|c| c[1..].to_string())
        .collect();

    let mut tokens = Vec::new();
    let mut inner_hashtag_tokens = Vec::new();
    for chunk in &chunks[..trailing_from] {
        for tok in tokenize(chunk) {
            match tok.strip_prefix('#') {
                Some(tag) if HASHTAG_TOKEN_RE.is_match(&tok) => {
                    inner_hashtag_tokens.push(tokens.len());
                    tokens.push(tag.to_string());
                }
                _ => tokens.push(tok),
            }
        }
    }

    if tokens.is_empty() {
        return Err(empty());
    }

    Ok(PreprocessedTweet {
        source_id: raw.id.clone(),
        tokens,
        extracted_urls,
        mentions,
        trailing_hashtags,
        inner_hashtag_tokens,
        date_cutoff: raw.created_at,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tweet(text: &str) -> RawTweet {
        RawTweet {
            id: "t".into(),
            text: text.into(),
            created_at: NaiveDate::from_ymd_opt(2015, 1, 9).unwrap(),
            event: Event::CharlieHebdo,
            author_handle: "someone".into(),
        }
    }

    #[test]
    fn charlie_hebdo_example() {
        let p = preprocess(&tweet(
            "MORE: Massacre suspects believed to have taken hostage and holed up in small industrial town northeast of Paris: http://t.co/xq4GEpIcWL #CharlieHebdo",
        ))
        .unwrap();
        assert_eq!(
            p.tokens.join(" "),
            "MORE : Massacre suspects believed to have taken hostage and holed up in small industrial town northeast of Paris :"
        );
        assert_eq!(p.trailing_hashtags, vec!["CharlieHebdo"]);
        assert_eq!(p.extracted_urls, vec!["http://t.co/xq4GEpIcWL"]);
        assert_eq!(p.date_cutoff, NaiveDate::from_ymd_opt(2015, 1, 9).unwrap());
    }

    #[test]
    fn plain_text_passes_through() {
        let p = preprocess(&tweet("Police confirm arrest")).unwrap();
        assert_eq!(p.tokens, vec!["Police", "confirm", "arrest"]);
        assert!(p.extracted_urls.is_empty());
        assert!(p.trailing_hashtags.is_empty());
        assert!(p.mentions.is_empty());
    }

    #[test]
    fn mention_url_and_trailing_tag() {
        let p = preprocess(&tweet("@CNN reports siege over http://t.co/x #SydneySiege")).unwrap();
        assert_eq!(p.tokens, vec!["user", "reports", "siege", "over"]);
        assert_eq!(p.trailing_hashtags, vec!["SydneySiege"]);
        assert_eq!(p.extracted_urls, vec!["http://t.co/x"]);
        assert_eq!(p.mentions, vec!["@CNN"]);
    }

    #[test]
    fn consecutive_mentions_each_become_user() {
        let p = preprocess(&tweet("@a @b_c: shots fired")).unwrap();
        assert_eq!(p.tokens, vec!["user", "user", ":", "shots", "fired"]);
    }

    #[test]
    fn mid_text_hashtags_lose_hash_in_place() {
        let p = preprocess(&tweet("Gunman in #Ottawa parliament, says #CBC #OttawaShooting #Canada")).unwrap();
        assert_eq!(p.tokens, vec!["Gunman", "in", "Ottawa", "parliament", ",", "says"]);
        assert_eq!(p.inner_hashtag_tokens, vec![2]);
        assert_eq!(p.trailing_hashtags, vec!["CBC", "OttawaShooting", "Canada"]);
    }

    #[test]
    fn hashtag_followed_by_punctuation_is_not_trailing() {
        let p = preprocess(&tweet("Pray for #Sydney.")).unwrap();
        assert_eq!(p.tokens, vec!["Pray", "for", "Sydney", "."]);
        assert!(p.trailing_hashtags.is_empty());
    }

    #[test]
    fn email_is_not_a_mention() {
        let p = preprocess(&tweet("write to tips@cnn.com now")).unwrap();
        assert!(p.mentions.is_empty());
        assert!(p.tokens.contains(&"tips@cnn.com".to_string()));
    }

    #[test]
    fn tweet_of_only_hashtags_and_urls_is_empty() {
        let err = preprocess(&tweet("http://t.co/a #JeSuisCharlie")).unwrap_err();
        assert_eq!(err, TextPrepError::EmptyTweet { id: "t".into() });
        assert!(preprocess(&tweet("   ")).is_err());
    }
}
