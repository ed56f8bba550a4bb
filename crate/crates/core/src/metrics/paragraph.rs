use super::{cosine, order_free_mean, EmbeddingStore, MetricsError, PairScorer};
use crate::retrieval::ArticleDoc;
use crate::text_prep::{is_word_token, tokenize, PreprocessedTweet};

/// Title plus the first two paragraphs.
pub const MAX_UNITS: usize = 3;

/// Non-blank units among the title and leading paragraphs, at most [`MAX_UNITS`].
pub fn scoring_units(article: &ArticleDoc) -> Vec<&str> {
    std::iter::once(article.title.as_str())
        .chain(article.paragraphs.iter().map(String::as_str))
        .take(MAX_UNITS)
        .filter(|u| !u.trim().is_empty())
        .collect()
}

fn words(text: &str) -> Vec<String> {
    tokenize(text).into_iter().filter(|t| is_word_token(t)).collect()
}

/// Mean clamped cosine between each unit's mean word vector and the rumour's.
/// Units without known words are skipped.
pub fn paragraph_score(article: &ArticleDoc, rumour: &PreprocessedTweet, store: &EmbeddingStore) -> Result<f64, MetricsError> {
    let rumour_words: Vec<&str> = rumour.tokens.iter().map(String::as_str).filter(|t| is_word_token(t)).collect();
    let target = store.mean_vector(rumour_words).ok_or(MetricsError::NoKnownWords)?;
    let mut cosines: Vec<f64> = scoring_units(article)
        .into_iter()
        .filter_map(|unit| {
            let w = words(unit);
            store.mean_vector(w.iter().map(String::as_str))
        })
        .map(|v| cosine(&v, &target).max(0.0))
        .collect();
    order_free_mean(&mut cosines).ok_or(MetricsError::NoKnownWords)
}

/// Like [`paragraph_score`] with each unit compared to the rumour text by an external scorer.
pub fn external_score(article: &ArticleDoc, rumour: &PreprocessedTweet, scorer: &dyn PairScorer) -> Result<f64, MetricsError> {
    let rumour_text = rumour.tokens.join(" ");
    let mut scores = scoring_units(article)
        .into_iter()
        .map(|unit| scorer.score(unit, &rumour_text).map(|s| s.clamp(0.0, 1.0)))
        .collect::<Result<Vec<f64>, _>>()?;
    order_free_mean(&mut scores).ok_or(MetricsError::NoKnownWords)
}
