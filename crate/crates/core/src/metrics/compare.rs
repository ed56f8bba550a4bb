use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::url_words::pair_cosines;
use super::{external_score, order_free_mean, paragraph_score, EmbeddingStore, MetricsError, PairScorer};
use crate::retrieval::ArticleDoc;
use crate::text_prep::{PreprocessedTweet, SegmentationDictionary};
use crate::types::Strategy;

/// Evidence retrieved for one rumour under one strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievedItem {
    pub rumour: PreprocessedTweet,
    /// URLs posted in the rumour's reactions.
    pub response_urls: Vec<String>,
    pub articles: Vec<ArticleDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyRun {
    pub strategy: Strategy,
    pub items: Vec<RetrievedItem>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub strategy: Strategy,
    pub url_words_score: f64,
    pub paragraph_embed_score: f64,
    pub external_score: Option<f64>,
    pub n_articles: usize,
    /// Pairs behind `url_words_score`; 0 means the score is a placeholder 0.
    pub url_word_pairs: usize,
    /// Articles behind `paragraph_embed_score`.
    pub paragraph_articles: usize,
}

impl MetricReport {
    pub fn value(&self, metric: MetricKind) -> Option<f64> {
        match metric {
            MetricKind::UrlWords => Some(self.url_words_score),
            MetricKind::ParagraphEmbed => Some(self.paragraph_embed_score),
            MetricKind::External => self.external_score,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    UrlWords,
    ParagraphEmbed,
    External,
}

impl MetricKind {
    pub fn label(self) -> &'static str {
        match self {
            MetricKind::UrlWords => "URL Words",
            MetricKind::ParagraphEmbed => "Embedding",
            MetricKind::External => "External",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricComparison {
    pub reports: Vec<MetricReport>,
    /// Strategies best-first under each metric; empty with fewer than two strategies.
    pub orderings: Vec<(MetricKind, Vec<Strategy>)>,
}

impl MetricComparison {
    /// True when every metric ranks the strategies identically.
    pub fn orders_agree(&self) -> bool {
        self.orderings.windows(2).all(|w| w[0].1 == w[1].1)
    }

    pub fn to_table(&self) -> String {
        let metrics = self.metrics();
        let mut out = format!("{:<14}", "Metric");
        for r in &self.reports {
            let _ = write!(out, " {:>12}", r.strategy.key());
        }
        out.push('\n');
        for m in metrics {
            let _ = write!(out, "{:<14}", m.label());
            for r in &self.reports {
                match r.value(m) {
                    Some(v) => {
                        let _ = write!(out, " {v:>12.3}");
                    }
                    None => {
                        let _ = write!(out, " {:>12}", "-");
                    }
                }
            }
            out.push('\n');
        }
        let _ = write!(out, "{:<14}", "Articles");
        for r in &self.reports {
            let _ = write!(out, " {:>12}", r.n_articles);
        }
        out.push('\n');
        out
    }

    fn metrics(&self) -> Vec<MetricKind> {
        let mut m = vec![MetricKind::UrlWords, MetricKind::ParagraphEmbed];
        if self.reports.iter().any(|r| r.external_score.is_some()) {
            m.push(MetricKind::External);
        }
        m
    }
}

#[derive(Default)]
struct Pooled {
    url: Vec<f64>,
    paragraph: Vec<f64>,
    external: Vec<f64>,
    articles: usize,
}

fn score_item(
    item: &RetrievedItem,
    url_store: &EmbeddingStore,
    paragraph_store: &EmbeddingStore,
    dict: &SegmentationDictionary,
    scorer: Option<&dyn PairScorer>,
) -> Result<Pooled, MetricsError> {
    let mut pooled = Pooled {
        url: pair_cosines(&item.articles, &item.response_urls, url_store, dict),
        articles: item.articles.len(),
        ..Pooled::default()
    };
    for article in item.articles.iter().filter(|a| !a.is_empty) {
        match paragraph_score(article, &item.rumour, paragraph_store) {
            Ok(s) => pooled.paragraph.push(s),
            Err(MetricsError::NoKnownWords) => {}
            Err(e) => return Err(e),
        }
        if let Some(scorer) = scorer {
            match external_score(article, &item.rumour, scorer) {
                Ok(s) => pooled.external.push(s),
                Err(MetricsError::NoKnownWords) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(pooled)
}

/// Scores each strategy's evidence with every metric, pooling over all
/// rumours, and ranks the strategies per metric.
pub fn compare_strategies(
    runs: &[StrategyRun],
    url_store: &EmbeddingStore,
    paragraph_store: &EmbeddingStore,
    dict: &SegmentationDictionary,
    scorer: Option<&dyn PairScorer>,
) -> Result<MetricComparison, MetricsError> {
    let mut reports = Vec::with_capacity(runs.len());
    for run in runs {
        let parts = run
            .items
            .par_iter()
            .map(|item| score_item(item, url_store, paragraph_store, dict, scorer))
            .collect::<Result<Vec<Pooled>, _>>()?;
        let mut all = Pooled::default();
        for p in parts {
            all.url.extend(p.url);
            all.paragraph.extend(p.paragraph);
            all.external.extend(p.external);
            all.articles += p.articles;
        }
        let (url_word_pairs, paragraph_articles) = (all.url.len(), all.paragraph.len());
        reports.push(MetricReport {
            strategy: run.strategy,
            url_words_score: order_free_mean(&mut all.url).unwrap_or(0.0),
            paragraph_embed_score: order_free_mean(&mut all.paragraph).unwrap_or(0.0),
            external_score: scorer.and_then(|_| order_free_mean(&mut all.external)),
            n_articles: all.articles,
            url_word_pairs,
            paragraph_articles,
        });
    }

    let mut comparison = MetricComparison {
        reports,
        orderings: Vec::new(),
    };
    if comparison.reports.len() >= 2 {
        for metric in comparison.metrics() {
            let mut order: Vec<(Strategy, f64)> = comparison
                .reports
                .iter()
                .map(|r| (r.strategy, r.value(metric).unwrap_or(0.0)))
                .collect();
            order.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
            comparison.orderings.push((metric, order.into_iter().map(|(s, _)| s).collect()));
        }
    }
    Ok(comparison)
}
