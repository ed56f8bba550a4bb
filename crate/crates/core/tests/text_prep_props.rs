use std::collections::BTreeMap;

use chrono::NaiveDate;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use rumour_evidence::text_prep::{best_split, preprocess, segment_hashtag, tokenize, RawTweet, SegmentationDictionary};
use rumour_evidence::Event;

/// Every split of `text` into dictionary words, by brute force over cut masks.
fn all_splits(text: &str, dict: &SegmentationDictionary) -> Vec<Vec<String>> {
    let chars: Vec<char> = text.chars().collect();
    let n = chars.len();
    let mut out = Vec::new();
    for mask in 0u32..(1 << (n - 1)) {
        let mut words = Vec::new();
        let mut start = 0;
        for i in 1..=n {
            if i == n || mask & (1 << (i - 1)) != 0 {
                words.push(chars[start..i].iter().collect::<String>());
                start = i;
            }
        }
        if words.iter().all(|w| dict.contains(w)) {
            out.push(words);
        }
    }
    out
}

fn probability(words: &[String], dict: &SegmentationDictionary) -> BigRational {
    let denom = BigInt::from(dict.total_count() + dict.vocabulary_size() as u64);
    words.iter().fold(BigRational::from_integer(BigInt::from(1)), |acc, w| {
        acc * BigRational::new(BigInt::from(dict.count(w).unwrap() + 1), denom.clone())
    })
}

/// Highest probability, then fewest words, then longest pieces leftmost.
fn oracle(text: &str, dict: &SegmentationDictionary) -> Option<Vec<String>> {
    all_splits(text, dict).into_iter().max_by(|a, b| {
        let la: Vec<usize> = a.iter().map(|w| w.chars().count()).collect();
        let lb: Vec<usize> = b.iter().map(|w| w.chars().count()).collect();
        probability(a, dict)
            .cmp(&probability(b, dict))
            .then(b.len().cmp(&a.len()))
            .then(la.cmp(&lb))
    })
}

fn dict_strategy() -> impl Strategy<Value = SegmentationDictionary> {
    proptest::collection::btree_map("[ab]{1,4}", 0u64..6, 1..14).prop_map(|m: BTreeMap<String, u64>| SegmentationDictionary::from_counts(m))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn dynamic_programme_matches_exhaustive_search(dict in dict_strategy(), tag in "[ab]{1,12}") {
        prop_assert_eq!(best_split(&tag, &dict), oracle(&tag, &dict));
    }

    #[test]
    fn segmentation_preserves_the_letters(dict in dict_strategy(), tag in "[abAB]{1,12}") {
        let pieces = segment_hashtag(&tag, &dict);
        prop_assert_eq!(pieces.concat().to_lowercase(), tag.to_lowercase());
        prop_assert_eq!(pieces.concat(), tag);
    }
}

#[test]
fn documented_hashtags_split() {
    let dict = SegmentationDictionary::load(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/dictionary.tsv")).unwrap();
    assert_eq!(segment_hashtag("CharlieHebdo", &dict), vec!["Charlie", "Hebdo"]);
    assert_eq!(segment_hashtag("OttawaShooting", &dict), vec!["Ottawa", "Shooting"]);
    assert_eq!(segment_hashtag("ottawashooting", &dict), vec!["ottawa", "shooting"]);
    assert_eq!(segment_hashtag("news", &dict), vec!["news"]);
    assert_eq!(oracle("ottawashooting", &dict), Some(vec!["ottawa".to_string(), "shooting".to_string()]));
}

fn chunk() -> impl Strategy<Value = String> {
    prop_oneof![
        4 => "[A-Za-z]{1,8}",
        1 => "[A-Za-z]{1,6}[.,:;!?)]{1,2}",
        1 => "[(\"'][A-Za-z]{1,6}",
        1 => "@[A-Za-z_0-9]{0,8}",
        1 => "#[A-Za-z0-9]{1,8}",
        1 => "https?://t\\.co/[A-Za-z0-9]{4,8}",
        1 => "www\\.[a-z]{2,6}\\.com",
        1 => "[A-Za-z]{1,5}n't",
        1 => "[A-Za-z]{1,5}@[a-z]{1,5}\\.com",
        1 => "[#@.:!?]{1,3}",
        1 => "[0-9]{1,4}",
    ]
}

fn text() -> impl Strategy<Value = String> {
    proptest::collection::vec((chunk(), prop_oneof![" ", "  ", "\t", ""]), 1..14)
        .prop_map(|parts| parts.into_iter().map(|(c, sep)| c + &sep).collect())
}

fn raw(text: &str) -> RawTweet {
    RawTweet {
        id: "p".into(),
        text: text.into(),
        created_at: NaiveDate::from_ymd_opt(2014, 10, 22).unwrap(),
        event: Event::OttawaShooting,
        author_handle: "a".into(),
    }
}

fn char_counts<'a>(parts: impl IntoIterator<Item = &'a str>) -> BTreeMap<char, i64> {
    let mut m = BTreeMap::new();
    for p in parts {
        for c in p.chars().filter(|c| !c.is_whitespace()) {
            *m.entry(c).or_insert(0) += 1;
        }
    }
    m.retain(|_, v| *v != 0);
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn every_character_is_accounted_for(t in text()) {
        let Ok(p) = preprocess(&raw(&t)) else { return Ok(()); };
        let mut accounted = char_counts(p.tokens.iter().map(String::as_str));
        for c in "user".chars() {
            *accounted.entry(c).or_insert(0) -= p.mentions.len() as i64;
        }
        let hashes = (p.trailing_hashtags.len() + p.inner_hashtag_tokens.len()) as i64;
        *accounted.entry('#').or_insert(0) += hashes;
        for (c, n) in char_counts(p.extracted_urls.iter().chain(&p.mentions).chain(&p.trailing_hashtags).map(String::as_str)) {
            *accounted.entry(c).or_insert(0) += n;
        }
        accounted.retain(|_, v| *v != 0);
        prop_assert_eq!(accounted, char_counts([t.as_str()]));
    }

    #[test]
    fn output_invariants(t in text()) {
        let Ok(p) = preprocess(&raw(&t)) else { return Ok(()); };
        for tok in &p.tokens {
            prop_assert!(!tok.starts_with('@'), "{tok}");
            prop_assert!(!tok.to_lowercase().contains("http://") && !tok.to_lowercase().contains("https://"));
            prop_assert!(!tok.to_lowercase().starts_with("www."), "{tok}");
        }
        for u in &p.extracted_urls {
            prop_assert!(t.contains(u.as_str()));
        }
        for &i in &p.inner_hashtag_tokens {
            prop_assert!(i < p.tokens.len());
        }
        prop_assert_eq!(p.date_cutoff, NaiveDate::from_ymd_opt(2014, 10, 22).unwrap());
    }

    #[test]
    fn preprocessing_is_idempotent(t in text()) {
        let Ok(first) = preprocess(&raw(&t)) else { return Ok(()); };
        let again = preprocess(&raw(&first.tokens.join(" "))).unwrap();
        prop_assert_eq!(again.tokens, first.tokens);
    }

    #[test]
    fn tokenization_is_stable(t in text()) {
        let once = tokenize(&t);
        prop_assert_eq!(tokenize(&once.join(" ")), once);
    }
}
