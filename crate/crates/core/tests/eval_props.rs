use std::collections::BTreeMap;

use chrono::{DateTime, NaiveDate};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rumour_evidence::dataset::{EnrichedEntry, EntryStatus, ThreadEntry};
use rumour_evidence::eval::{
    class_scores, evaluate_predictions, included, macro_f1, macro_from_class_f1, majority_vote, make_folds, run_baseline,
    LabelCounts, PredictionRecord, Scenario,
};
use rumour_evidence::retrieval::ArticleDoc;
use rumour_evidence::select::ScoredSentence;
use rumour_evidence::text_prep::RawTweet;
use rumour_evidence::{Event, Label, Strategy};

const STATUSES: [EntryStatus; 4] = [
    EntryStatus::Complete,
    EntryStatus::InsufficientSentences,
    EntryStatus::NoArticles,
    EntryStatus::EmptyRumour,
];

fn entry(id: String, event: Event, label: Label, status: EntryStatus, words: &[&str]) -> EnrichedEntry {
    let source = RawTweet {
        id,
        text: words.join(" "),
        created_at: NaiveDate::from_ymd_opt(2015, 1, 9).unwrap(),
        event,
        author_handle: "h".into(),
    };
    let sentences = (0..5)
        .map(|i| ScoredSentence {
            text: format!("{} report {i}", words.join(" ")),
            tokens: words.iter().map(|w| w.to_string()).collect(),
            source_url: "https://a.example/x".into(),
            article_rank: 1,
            position_in_article: i,
            raw_overlap: 1,
            final_score: 1.0,
        })
        .collect();
    EnrichedEntry {
        thread: ThreadEntry {
            source,
            reactions: vec![],
            reaction_urls: vec![],
            label,
            event,
        },
        strategy_used: Strategy::Preprocessed,
        status,
        articles: vec![ArticleDoc::new(
            "https://a.example/x".into(),
            "T".into(),
            vec!["p".into()],
            1,
            DateTime::from_timestamp(0, 0).unwrap(),
        )],
        selected_sentences: sentences,
    }
}

fn random_corpus(rng: &mut ChaCha8Rng) -> Vec<EnrichedEntry> {
    let n = rng.gen_range(10..120);
    let mut events: Vec<Event> = Event::ALL.to_vec();
    events.extend((5..n).map(|_| *Event::ALL.choose(rng).unwrap()));
    events.shuffle(rng);
    events
        .into_iter()
        .enumerate()
        .map(|(i, event)| {
            let status = if rng.gen_bool(0.9) { EntryStatus::Complete } else { *STATUSES.choose(rng).unwrap() };
            entry(format!("{:06}", rng.gen_range(0..1_000_000) * 1000 + i), event, *Label::ALL.choose(rng).unwrap(), status, &["police"])
        })
        .collect()
}

#[test]
fn leave_one_event_out_has_no_leakage() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut checked = 0;
    while checked < 100 {
        let mut corpus = random_corpus(&mut rng);
        // Keep every event represented among complete threads.
        for event in Event::ALL {
            if !corpus.iter().any(|e| e.thread.event == event && e.is_complete()) {
                corpus.push(entry(format!("pad-{event}"), event, Label::True, EntryStatus::Complete, &["x"]));
            }
        }
        let folds = make_folds(&corpus).unwrap();
        assert_eq!(folds.len(), 5);
        let mut test_hits: BTreeMap<&str, usize> = BTreeMap::new();
        let mut train_hits: BTreeMap<&str, usize> = BTreeMap::new();
        let event_of: BTreeMap<&str, Event> = corpus.iter().map(|e| (e.id(), e.thread.event)).collect();
        for fold in &folds {
            for id in &fold.test_ids {
                *test_hits.entry(id).or_default() += 1;
                assert_eq!(event_of[id.as_str()], fold.held_out_event);
                assert!(!fold.train_ids.contains(id));
            }
            for id in &fold.train_ids {
                *train_hits.entry(id).or_default() += 1;
                assert_ne!(event_of[id.as_str()], fold.held_out_event);
            }
        }
        for e in &corpus {
            if e.is_complete() {
                assert_eq!(test_hits.get(e.id()), Some(&1));
                assert_eq!(train_hits.get(e.id()), Some(&4));
            } else {
                assert!(!test_hits.contains_key(e.id()) && !train_hits.contains_key(e.id()));
            }
        }
        assert_eq!(test_hits.len(), included(&corpus).len());
        checked += 1;
    }
}

#[test]
fn macro_arithmetic_matches_reported_rows() {
    for (f1, reported) in [([0.221, 0.549, 0.265], 0.345), ([0.384, 0.600, 0.279], 0.421)] {
        assert!((macro_from_class_f1(&f1) - reported).abs() <= 0.0005);
    }
    // The third reported macro value is the mean of its per-event scores, not of its per-class scores.
    assert!((macro_from_class_f1(&[0.186, 0.480, 0.250]) - 0.30533).abs() < 1e-4);
    assert!((macro_from_class_f1(&[0.354, 0.256, 0.365, 0.591, 0.458]) - 0.405).abs() <= 0.0005);
}

#[test]
fn class_scores_by_hand() {
    use Label::*;
    let gold = [False, False, True, True, True, Unverified];
    let pred = [False, True, True, True, Unverified, Unverified];
    let s = class_scores(&gold, &pred).unwrap();
    // False: p 1/1, r 1/2. True: p 2/3, r 2/3. Unverified: p 1/2, r 1/1.
    let expect = [2.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0];
    for (a, b) in s.f1.iter().zip(expect) {
        assert!((a - b).abs() < 1e-12);
    }
    let r = macro_f1(&gold, &pred).unwrap();
    assert!(r.is_consistent());
    assert_eq!(r.n, 6);
    // A class never gold nor predicted scores 0.
    let s = class_scores(&[True, True], &[True, True]).unwrap();
    assert_eq!(s.f1, [0.0, 1.0, 0.0]);
}

#[test]
fn baseline_predictions_round_trip_through_evaluation() {
    let mut corpus = Vec::new();
    let vocab = [(Label::True, "confirmed"), (Label::False, "hoax"), (Label::Unverified, "rumoured")];
    for (i, event) in Event::ALL.into_iter().cycle().take(60).enumerate() {
        let (label, word) = vocab[i % 3];
        corpus.push(entry(format!("{i:03}"), event, label, EntryStatus::Complete, &[word, "police"]));
    }
    let folds = make_folds(&corpus).unwrap();
    for scenario in Scenario::ALL {
        let records = run_baseline(&corpus, &folds, scenario).unwrap();
        let expected_per_thread = if scenario == Scenario::RumourOnly { 1 } else { 5 };
        assert_eq!(records.len(), 60 * expected_per_thread);
        let (report, outcomes) = evaluate_predictions(&corpus, &folds, &records, 5).unwrap();
        assert_eq!(outcomes.len(), 60);
        assert!(report.is_consistent());
        // The label word separates classes perfectly.
        assert!((report.macro_f1 - 1.0).abs() < 1e-12, "{scenario:?}: {}", report.macro_f1);
    }
}

#[test]
fn predictions_must_match_folds() {
    let corpus: Vec<EnrichedEntry> = Event::ALL
        .into_iter()
        .enumerate()
        .map(|(i, e)| entry(format!("{i}"), e, Label::True, EntryStatus::Complete, &["a"]))
        .collect();
    let folds = make_folds(&corpus).unwrap();
    let mut records: Vec<PredictionRecord> = corpus
        .iter()
        .map(|e| PredictionRecord {
            thread_id: e.id().to_string(),
            pair_index: 0,
            predicted_label: Label::True,
            fold: e.thread.event,
        })
        .collect();
    assert!(evaluate_predictions(&corpus, &folds, &records, 5).is_ok());
    records[0].fold = Event::Ferguson;
    assert!(evaluate_predictions(&corpus, &folds, &records, 5).is_err());
    records[0].fold = corpus[0].thread.event;
    records[0].pair_index = 5;
    assert!(evaluate_predictions(&corpus, &folds, &records, 5).is_err());
    records.pop();
    records[0].pair_index = 0;
    assert!(evaluate_predictions(&corpus, &folds, &records, 5).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn vote_ignores_order(
        votes in prop::collection::vec(prop::sample::select(Label::ALL.to_vec()), 1..12),
        prior in prop::array::uniform3(0usize..20),
        seed in any::<u64>(),
    ) {
        let training = LabelCounts(prior);
        let first = majority_vote(votes.iter().copied(), &training);
        let mut shuffled = votes.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(first, majority_vote(shuffled, &training));
        let winner = first.unwrap();
        let counts = LabelCounts::tally(votes);
        prop_assert!(Label::ALL.iter().all(|l| counts.get(*l) <= counts.get(winner)));
    }

    #[test]
    fn f1_values_stay_in_range(
        pairs in prop::collection::vec((prop::sample::select(Label::ALL.to_vec()), prop::sample::select(Label::ALL.to_vec())), 0..50),
    ) {
        let (gold, pred): (Vec<Label>, Vec<Label>) = pairs.into_iter().unzip();
        let r = macro_f1(&gold, &pred).unwrap();
        prop_assert!(r.is_consistent());
        prop_assert_eq!(r.n, gold.len());
    }
}
