use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::{EnrichedEntry, UrlCanonicalizer};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlapCounts {
    pub web_overall: usize,
    pub web_unique: usize,
    pub thread_overall: usize,
    pub thread_unique: usize,
    /// Sum over shared canonical URLs of the smaller of the two occurrence counts.
    pub overlap_overall: usize,
    pub overlap_unique: usize,
}

impl OverlapCounts {
    fn compute(web: &[String], thread: &[String]) -> Self {
        fn count(urls: &[String]) -> BTreeMap<&str, usize> {
            let mut m = BTreeMap::new();
            for u in urls {
                *m.entry(u.as_str()).or_default() += 1;
            }
            m
        }
        let (w, t) = (count(web), count(thread));
        let shared: BTreeSet<&str> = w.keys().filter(|k| t.contains_key(*k)).copied().collect();
        Self {
            web_overall: web.len(),
            web_unique: w.len(),
            thread_overall: thread.len(),
            thread_unique: t.len(),
            overlap_overall: shared.iter().map(|k| w[k].min(t[k])).sum(),
            overlap_unique: shared.len(),
        }
    }
}

/// Web-search articles against URLs posted in the threads, for all
/// reaction URLs and for those whose page is non-empty.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlapReport {
    pub all: OverlapCounts,
    pub not_empty: OverlapCounts,
}

/// `reaction_non_empty` maps a canonical URL to whether its page has a title
/// and body; URLs missing from the map count as empty.
pub fn overlap_report(
    entries: &[EnrichedEntry],
    canonicalizer: &UrlCanonicalizer,
    reaction_non_empty: &HashMap<String, bool>,
) -> OverlapReport {
    let web: Vec<String> = entries
        .iter()
        .flat_map(|e| e.articles.iter().map(|a| canonicalizer.canonical(&a.url)))
        .collect();
    let thread: Vec<String> = entries
        .iter()
        .flat_map(|e| e.thread.reaction_urls.iter().map(|u| canonicalizer.canonical(u)))
        .collect();
    let web_ok: Vec<String> = entries
        .iter()
        .flat_map(|e| e.articles.iter().filter(|a| !a.is_empty).map(|a| canonicalizer.canonical(&a.url)))
        .collect();
    let thread_ok: Vec<String> = thread
        .iter()
        .filter(|u| reaction_non_empty.get(*u).copied().unwrap_or(false))
        .cloned()
        .collect();
    OverlapReport {
        all: OverlapCounts::compute(&web, &thread),
        not_empty: OverlapCounts::compute(&web_ok, &thread_ok),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn synthetic_multiset() {
        let c = OverlapCounts::compute(&v(&["a", "a", "b"]), &v(&["b", "c"]));
        assert_eq!((c.web_overall, c.web_unique), (3, 2));
        assert_eq!((c.thread_overall, c.thread_unique), (2, 2));
        assert_eq!((c.overlap_overall, c.overlap_unique), (1, 1));
    }

    #[test]
    fn repeated_shared_urls_count_pairwise() {
        let c = OverlapCounts::compute(&v(&["a", "a", "a", "b"]), &v(&["a", "a", "b", "b"]));
        assert_eq!(c.overlap_unique, 2);
        assert_eq!(c.overlap_overall, 3);
    }
}
