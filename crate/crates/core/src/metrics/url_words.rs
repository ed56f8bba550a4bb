use std::collections::BTreeSet;

use once_cell::sync::Lazy;

use super::{cosine, order_free_mean, EmbeddingStore, MetricsError};
use crate::retrieval::ArticleDoc;
use crate::stopwords;
use crate::text_prep::{segment_hashtag, SegmentationDictionary};

/// Second-level labels that make a three-label registrable domain (`bbc.co.uk`).
const SECOND_LEVEL: &[&str] = &["co", "com", "org", "net", "gov", "ac", "edu", "gv", "ne", "or"];

/// Host labels that carry no topical content.
const HOST_NOISE: &[&str] = &["www", "m", "mobile", "amp", "www2", "www3"];

/// Scheme, extension and markup leftovers.
const URL_NOISE: &[&str] = &[
    "http", "https", "www", "com", "org", "net", "html", "htm", "shtml", "php", "asp", "aspx", "jsp", "cfm", "cgi",
    "index", "amp",
];

static ENGLISH: Lazy<BTreeSet<String>> = Lazy::new(stopwords::english);

/// Topical words in a URL, using the built-in English stopword list.
pub fn url_words(url: &str, dict: &SegmentationDictionary) -> Result<Vec<String>, MetricsError> {
    url_words_with(url, dict, &ENGLISH)
}

/// Splits the subdomain labels and path of a URL into lowercase words.
///
/// The registrable domain and its suffix are dropped, as are digits,
/// stopwords and scheme or file-extension tokens. Each alphabetic run is
/// segmented like a hashtag.
pub fn url_words_with(url: &str, dict: &SegmentationDictionary, stopwords: &BTreeSet<String>) -> Result<Vec<String>, MetricsError> {
    let parsed = parse(url)?;
    let mut chunks: Vec<String> = Vec::new();
    if let Some(host) = parsed.host_str() {
        chunks.extend(subdomain_labels(host).into_iter().map(str::to_string));
    }
    let path = percent_decode(parsed.path());
    chunks.push(path);

    let mut words = Vec::new();
    for chunk in &chunks {
        for run in chunk.split(|c: char| !c.is_alphabetic()).filter(|r| !r.is_empty()) {
            for piece in segment_hashtag(run, dict) {
                let w = piece.to_lowercase();
                if !stopwords.contains(&w) && !URL_NOISE.contains(&w.as_str()) {
                    words.push(w);
                }
            }
        }
    }
    Ok(words)
}

fn parse(url: &str) -> Result<url::Url, MetricsError> {
    let trimmed = url.trim();
    let attempt = url::Url::parse(trimmed).or_else(|e| match e {
        url::ParseError::RelativeUrlWithoutBase => url::Url::parse(&format!("http://{trimmed}")),
        other => Err(other),
    });
    match attempt {
        Ok(u) if u.has_host() => Ok(u),
        _ => Err(MetricsError::UnparseableUrl(url.to_string())),
    }
}

fn subdomain_labels(host: &str) -> Vec<&str> {
    if host.parse::<std::net::IpAddr>().is_ok() || host.starts_with('[') {
        return Vec::new();
    }
    let labels: Vec<&str> = host.split('.').filter(|l| !l.is_empty()).collect();
    let n = labels.len();
    let suffix = if n >= 3 && labels[n - 1].len() == 2 && SECOND_LEVEL.contains(&labels[n - 2]) {
        3
    } else {
        2
    };
    labels[..n.saturating_sub(suffix)]
        .iter()
        .copied()
        .filter(|l| !HOST_NOISE.contains(&l.to_ascii_lowercase().as_str()))
        .collect()
}

fn percent_decode(path: &str) -> String {
    let bytes = path.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' && i + 2 < bytes.len() {
            if let Ok(b) = u8::from_str_radix(&path[i + 1..i + 3], 16) {
                out.push(b);
                i += 3;
                continue;
            }
        }
        out.push(bytes[i]);
        i += 1;
    }
    String::from_utf8_lossy(&out).into_owned()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UrlWordsScore {
    pub score: f64,
    /// Number of (article, response URL) pairs that contributed.
    pub pairs: usize,
}

/// Mean clamped cosine over all (article URL, response URL) pairs whose word
/// lists both contain in-vocabulary words. Unparseable URLs contribute nothing.
pub fn url_words_score(
    articles: &[ArticleDoc],
    response_urls: &[String],
    store: &EmbeddingStore,
    dict: &SegmentationDictionary,
) -> Result<UrlWordsScore, MetricsError> {
    let mut cosines = pair_cosines(articles, response_urls, store, dict);
    let pairs = cosines.len();
    let score = order_free_mean(&mut cosines).ok_or(MetricsError::NoScorablePairs)?;
    Ok(UrlWordsScore { score, pairs })
}

/// Clamped cosine of every scorable (article, response URL) pair.
pub(crate) fn pair_cosines(
    articles: &[ArticleDoc],
    response_urls: &[String],
    store: &EmbeddingStore,
    dict: &SegmentationDictionary,
) -> Vec<f64> {
    let vector = |url: &str| -> Option<Vec<f64>> {
        let words = url_words(url, dict).ok()?;
        store.mean_vector(words.iter().map(String::as_str))
    };
    let responses: Vec<Vec<f64>> = response_urls.iter().filter_map(|u| vector(u)).collect();
    let mut cosines = Vec::new();
    for article in articles {
        if let Some(a) = vector(&article.url) {
            cosines.extend(responses.iter().map(|r| cosine(&a, r).max(0.0)));
        }
    }
    cosines
}
