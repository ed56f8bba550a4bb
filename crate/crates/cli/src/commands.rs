use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use anyhow::{anyhow, Context};
use log::warn;
use serde::{Deserialize, Serialize};

use rumour_evidence::dataset::{
    self, load_corpus, overlap_report, read_dataset, write_dataset, AssemblyConfig, CorpusStats, EnrichedEntry, OverlapReport,
    ThreadEntry, ThreadEvidence, UrlCanonicalizer, DATASET_KIND, MAX_ARTICLES,
};
use rumour_evidence::eval::{
    evaluate_predictions, included, make_folds, read_predictions, run_baseline, write_predictions, EvalReport, Scenario,
    PREDICTIONS_KIND,
};
use rumour_evidence::jsonl::{self, FileHeader};
use rumour_evidence::metrics::{
    compare_strategies, EmbeddingStore, MetricComparison, PairScorer, ProcessScorer, RetrievedItem, SocketScorer, StrategyRun,
};
use rumour_evidence::parse_ingest::{read_parses_lenient, read_triples};
use rumour_evidence::query::{build_query, Query};
use rumour_evidence::retrieval::{search as run_search, CorpusDocument, LiveBackend, LiveConfig, OfflineBackend, OfflineCorpusIndex, SearchBackend};
use rumour_evidence::select::{select_sentences, AllWords, ScoredSentence, SelectError, TripleTable, TripleWords};
use rumour_evidence::text_prep::{preprocess, PreprocessedTweet, RawTweet, SegmentationDictionary};
use rumour_evidence::Strategy;

use crate::config::RunConfig;
use crate::{Failure, RumourInput};

const PREPROCESSED_KIND: &str = "preprocessed";
const TWEETS_KIND: &str = "tweets";
const QUERIES_KIND: &str = "queries";
const EVIDENCE_KIND: &str = "evidence";
const SENTENCES_KIND: &str = "sentences";
const CORPUS_KIND: &str = "corpus";

type Outcome = Result<(), Failure>;

fn invalid(msg: impl std::fmt::Display) -> Failure {
    Failure::Validation(anyhow!("{msg}"))
}

/// Input files are checked up front so a typo is a validation error.
fn need(path: &Path) -> Result<&Path, Failure> {
    if path.exists() {
        Ok(path)
    } else {
        Err(invalid(format!("{} does not exist", path.display())))
    }
}

fn header(cfg: &RunConfig, kind: &str) -> FileHeader {
    FileHeader::new(kind, cfg.hash(), cfg.seed())
}

/// Writes records to the resolved output path, or to stdout.
fn emit<T: Serialize>(cfg: &RunConfig, out: Option<&Path>, name: &str, kind: &str, records: &[T]) -> Outcome {
    let h = header(cfg, kind);
    match cfg.output_path(out, name) {
        Some(path) => jsonl::write_jsonl(&path, &h, records).with_context(|| format!("writing {}", path.display()))?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            jsonl::write_records(&mut lock, &h, records).context("writing to stdout")?;
            lock.flush().context("writing to stdout")?;
        }
    }
    Ok(())
}

fn dictionary(cfg: &RunConfig) -> Result<SegmentationDictionary, Failure> {
    match &cfg.dictionary {
        Some(p) => Ok(SegmentationDictionary::load(p).with_context(|| format!("reading dictionary {}", p.display()))?),
        None => {
            warn!("no --dictionary given; hashtags and URL words are left unsegmented");
            Ok(SegmentationDictionary::default())
        }
    }
}

fn threads(corpus: &Path) -> Result<Vec<ThreadEntry>, Failure> {
    Ok(load_corpus(need(corpus)?).with_context(|| format!("loading corpus {}", corpus.display()))?)
}

fn clean(raw: &[RawTweet]) -> Vec<PreprocessedTweet> {
    raw.iter()
        .filter_map(|t| match preprocess(t) {
            Ok(p) => Some(p),
            Err(e) => {
                warn!("skipping: {e}");
                None
            }
        })
        .collect()
}

fn rumours(input: &RumourInput) -> Result<Vec<PreprocessedTweet>, Failure> {
    if let Some(p) = &input.preprocessed {
        return Ok(jsonl::read_records(need(p)?, PREPROCESSED_KIND).with_context(|| format!("reading {}", p.display()))?);
    }
    if let Some(p) = &input.tweets {
        let raw: Vec<RawTweet> = jsonl::read_records(need(p)?, TWEETS_KIND).with_context(|| format!("reading {}", p.display()))?;
        return Ok(clean(&raw));
    }
    if let Some(p) = &input.corpus {
        let sources: Vec<RawTweet> = threads(p)?.into_iter().map(|t| t.source).collect();
        return Ok(clean(&sources));
    }
    Err(invalid("one of --tweets, --corpus or --preprocessed is required"))
}

pub fn preprocess_stage(cfg: &RunConfig, input: &RumourInput, out: Option<&Path>) -> Outcome {
    let tweets = rumours(input)?;
    emit(cfg, out, "preprocessed.jsonl", PREPROCESSED_KIND, &tweets)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QueryRecord {
    pub thread_id: String,
    pub rendered: String,
    pub query: Query,
}

pub fn build_queries(
    cfg: &RunConfig,
    input: &RumourInput,
    parses: Option<&Path>,
    triples: Option<&Path>,
    out: Option<&Path>,
) -> Outcome {
    let strategy = cfg.strategy.unwrap_or(Strategy::Preprocessed);
    if strategy != Strategy::Preprocessed && parses.is_none() {
        return Err(invalid(format!("strategy {strategy} needs --parses")));
    }
    if triples.is_some() && parses.is_none() {
        return Err(invalid("--triples needs --parses to locate spans"));
    }
    let tweets = rumours(input)?;
    let dict = dictionary(cfg)?;
    let parsed = match parses {
        Some(p) => {
            let batch = read_parses_lenient(need(p)?).with_context(|| format!("reading {}", p.display()))?;
            for e in &batch.errors {
                warn!("{}: {e}", p.display());
            }
            batch.sentences
        }
        None => Default::default(),
    };
    let extracted = match triples {
        Some(p) => Some(read_triples(need(p)?, &parsed).with_context(|| format!("reading {}", p.display()))?),
        None => None,
    };

    let mut records = Vec::new();
    for tweet in &tweets {
        let parse = parsed.get(&tweet.source_id);
        let given = extracted.as_ref().and_then(|t| t.get(&tweet.source_id)).map(Vec::as_slice);
        match build_query(tweet, parse, given, strategy, &dict) {
            Ok(query) => records.push(QueryRecord {
                thread_id: tweet.source_id.clone(),
                rendered: query.render(),
                query,
            }),
            Err(e) => warn!("skipping: {e}"),
        }
    }
    if records.is_empty() && !tweets.is_empty() {
        return Err(Failure::Runtime(anyhow!("no query could be built under strategy {strategy}")));
    }
    if cfg.output_path(out, "queries.jsonl").is_none() {
        let mut stdout = std::io::stdout().lock();
        for r in &records {
            writeln!(stdout, "{}", r.rendered).context("writing to stdout")?;
        }
        return Ok(());
    }
    emit(cfg, out, "queries.jsonl", QUERIES_KIND, &records)
}

fn backend(cfg: &RunConfig) -> Result<(Box<dyn SearchBackend>, usize), Failure> {
    let spec = cfg.backend.as_deref().ok_or_else(|| invalid("search needs --backend live|offline:<path>"))?;
    if let Some(path) = spec.strip_prefix("offline:") {
        let index = OfflineCorpusIndex::load(path).with_context(|| format!("loading offline corpus {path}"))?;
        return Ok((Box::new(OfflineBackend::new(Arc::new(index))), 4));
    }
    let mut live = LiveConfig::from_env().map_err(invalid)?;
    if let Some(r) = cfg.rate_limit {
        live.requests_per_second = r;
    }
    let workers = live.max_in_flight;
    Ok((Box::new(LiveBackend::new(live).map_err(invalid)?), workers))
}

pub fn search(cfg: &RunConfig, queries: &Path, out: Option<&Path>) -> Outcome {
    let records: Vec<QueryRecord> =
        jsonl::read_records(need(queries)?, QUERIES_KIND).with_context(|| format!("reading {}", queries.display()))?;
    let (backend, workers) = backend(cfg)?;
    // Each pass collects the next `max_results` non-empty results.
    let want = (cfg.max_results() * cfg.passes()).min(MAX_ARTICLES);

    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<anyhow::Result<ThreadEvidence>>>> = Mutex::new((0..records.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers.max(1).min(records.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(r) = records.get(i) else { break };
                let found = run_search(&r.query, backend.as_ref(), want)
                    .map(|articles| ThreadEvidence {
                        thread_id: r.thread_id.clone(),
                        strategy: r.query.strategy,
                        articles,
                    })
                    .with_context(|| format!("searching for thread {}", r.thread_id));
                results.lock().expect("no worker panics")[i] = Some(found);
            });
        }
    });
    let evidence = results
        .into_inner()
        .expect("no worker panics")
        .into_iter()
        .map(|r| r.expect("every query searched"))
        .collect::<anyhow::Result<Vec<_>>>()?;
    emit(cfg, out, "evidence.jsonl", EVIDENCE_KIND, &evidence)
}

fn read_evidence(paths: &[PathBuf]) -> Result<Vec<Vec<ThreadEvidence>>, Failure> {
    paths
        .iter()
        .map(|p| Ok(jsonl::read_records(need(p)?, EVIDENCE_KIND).with_context(|| format!("reading {}", p.display()))?))
        .collect()
}

fn sentence_triples(path: Option<&Path>) -> Result<Box<dyn TripleWords>, Failure> {
    Ok(match path {
        Some(p) => Box::new(TripleTable::load(need(p)?).with_context(|| format!("reading {}", p.display()))?),
        None => Box::new(AllWords),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SentenceRecord {
    pub thread_id: String,
    pub complete: bool,
    pub sentences: Vec<ScoredSentence>,
}

pub fn select(cfg: &RunConfig, input: &RumourInput, evidence: &Path, triples: Option<&Path>, out: Option<&Path>) -> Outcome {
    let selection = cfg.selection().map_err(Failure::Validation)?;
    let tweets = rumours(input)?;
    let evidence = read_evidence(&[evidence.to_path_buf()])?.remove(0);
    let triples = sentence_triples(triples)?;
    let mut by_thread: HashMap<&str, Vec<_>> = HashMap::new();
    for ev in &evidence {
        by_thread.entry(ev.thread_id.as_str()).or_default().extend(ev.articles.iter().cloned());
    }
    let mut records = Vec::new();
    for tweet in &tweets {
        let articles = by_thread.get(tweet.source_id.as_str()).map(Vec::as_slice).unwrap_or(&[]);
        let (complete, sentences) = match select_sentences(tweet, articles, triples.as_ref(), &selection) {
            Ok(s) => (true, s),
            Err(SelectError::InsufficientEvidence { selected }) => (false, selected),
            Err(SelectError::NoArticles) => (false, Vec::new()),
            Err(e) => return Err(Failure::Runtime(anyhow!("thread {}: {e}", tweet.source_id))),
        };
        records.push(SentenceRecord {
            thread_id: tweet.source_id.clone(),
            complete,
            sentences,
        });
    }
    emit(cfg, out, "sentences.jsonl", SENTENCES_KIND, &records)
}

pub fn assemble(cfg: &RunConfig, corpus: &Path, evidence: &[PathBuf], triples: Option<&Path>, out: Option<&Path>) -> Outcome {
    let selection = cfg.selection().map_err(Failure::Validation)?;
    let threads = threads(corpus)?;
    let evidence: Vec<ThreadEvidence> = read_evidence(evidence)?.into_iter().flatten().collect();
    let triples = sentence_triples(triples)?;
    let assembly = AssemblyConfig {
        selection,
        max_articles: MAX_ARTICLES,
        default_strategy: cfg.strategy.unwrap_or(Strategy::Preprocessed),
    };
    let report = dataset::assemble(&threads, &evidence, triples.as_ref(), &assembly).context("assembling dataset")?;
    eprintln!(
        "{} of {} threads have a full sentence quota ({:.1}%)",
        report.complete,
        report.entries.len(),
        100.0 * report.completeness_ratio()
    );
    let h = header(cfg, DATASET_KIND);
    match cfg.output_path(out, "dataset.jsonl") {
        Some(path) => write_dataset(&path, &report.entries, &h).with_context(|| format!("writing {}", path.display()))?,
        None => emit(cfg, None, "", DATASET_KIND, &report.entries)?,
    }
    Ok(())
}

fn dataset_entries(path: &Path) -> Result<Vec<EnrichedEntry>, Failure> {
    Ok(read_dataset(need(path)?).with_context(|| format!("reading {}", path.display()))?.1)
}

pub fn stats(cfg: &RunConfig, dataset: Option<&Path>, corpus: Option<&Path>, out: Option<&Path>) -> Outcome {
    let stats = match (dataset, corpus) {
        (Some(d), _) => CorpusStats::from_entries(&dataset_entries(d)?),
        (None, Some(c)) => CorpusStats::from_threads(&threads(c)?),
        (None, None) => return Err(invalid("stats needs --dataset or --corpus")),
    };
    stats.cross_foot().map_err(|e| Failure::Runtime(anyhow!("counts do not cross-foot: {e}")))?;
    print!("{stats}");
    if let Some(path) = cfg.output_path(out, "stats.jsonl") {
        jsonl::write_jsonl(&path, &header(cfg, "stats"), &[stats]).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn overlap_table(report: &OverlapReport) -> String {
    let mut out = format!("{:<22} {:>9} {:>9} {:>9} {:>9}\n", "", "Overall", "Unique", "Overall", "Unique");
    out.push_str(&format!("{:<22} {:>19} {:>19}\n", "", "(all)", "(not empty)"));
    let (a, n) = (&report.all, &report.not_empty);
    for (name, x, y, z, w) in [
        ("Web search articles", a.web_overall, a.web_unique, n.web_overall, n.web_unique),
        ("Thread URLs", a.thread_overall, a.thread_unique, n.thread_overall, n.thread_unique),
        ("Overlap", a.overlap_overall, a.overlap_unique, n.overlap_overall, n.overlap_unique),
    ] {
        out.push_str(&format!("{name:<22} {x:>9} {y:>9} {z:>9} {w:>9}\n"));
    }
    out
}

pub fn overlap(cfg: &RunConfig, dataset: &Path, expansions: Option<&Path>, pages: Option<&Path>, out: Option<&Path>) -> Outcome {
    let entries = dataset_entries(dataset)?;
    let canon = match expansions {
        Some(p) => UrlCanonicalizer::load(need(p)?).with_context(|| format!("reading {}", p.display()))?,
        None => UrlCanonicalizer::new(),
    };
    let mut non_empty = HashMap::new();
    if let Some(p) = pages {
        let docs: Vec<CorpusDocument> = jsonl::read_records(need(p)?, CORPUS_KIND).with_context(|| format!("reading {}", p.display()))?;
        for d in docs {
            let ok = !d.title.trim().is_empty() && !d.paragraphs.is_empty();
            *non_empty.entry(canon.canonical(&d.url)).or_insert(false) |= ok;
        }
    } else {
        warn!("no --reaction-pages given; every thread URL counts as empty");
    }
    let report = overlap_report(&entries, &canon, &non_empty);
    print!("{}", overlap_table(&report));
    if let Some(path) = cfg.output_path(out, "overlap.jsonl") {
        jsonl::write_jsonl(&path, &header(cfg, "overlap"), &[report]).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvaluationRow {
    pub name: String,
    pub report: EvalReport,
}

fn with_suffix(path: &Path, key: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = path.extension().map(|e| format!(".{}", e.to_string_lossy())).unwrap_or_default();
    let key = key.replace('+', "-");
    path.with_file_name(format!("{stem}.{key}{ext}"))
}

pub fn evaluate(
    cfg: &RunConfig,
    dataset: &Path,
    predictions: &str,
    scenarios: &[String],
    predictions_out: Option<&Path>,
    out: Option<&Path>,
) -> Outcome {
    let top_k = cfg.selection().map_err(Failure::Validation)?.top_k;
    let entries = dataset_entries(dataset)?;
    let folds = make_folds(&entries).context("building folds")?;
    eprintln!("{} of {} threads meet the sentence quota", included(&entries).len(), entries.len());

    let mut rows = Vec::new();
    if predictions == "baseline" {
        let mut chosen = Vec::new();
        for s in scenarios {
            chosen.push(s.parse::<Scenario>().map_err(invalid)?);
        }
        if chosen.is_empty() {
            chosen = Scenario::ALL.to_vec();
        }
        for scenario in &chosen {
            let records = run_baseline(&entries, &folds, *scenario).context("running baseline")?;
            if let Some(p) = predictions_out {
                let p = if chosen.len() > 1 { with_suffix(p, scenario.key()) } else { p.to_path_buf() };
                write_predictions(&p, &records, &header(cfg, PREDICTIONS_KIND)).with_context(|| format!("writing {}", p.display()))?;
            }
            let (report, _) = evaluate_predictions(&entries, &folds, &records, top_k).context("scoring predictions")?;
            rows.push(EvaluationRow {
                name: scenario.display_name().to_string(),
                report,
            });
        }
    } else {
        let path = Path::new(predictions);
        let records = read_predictions(need(path)?).with_context(|| format!("reading {predictions}"))?;
        let (report, _) = evaluate_predictions(&entries, &folds, &records, top_k).context("scoring predictions")?;
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        rows.push(EvaluationRow { name, report });
    }

    println!("{}", EvalReport::table_header());
    for row in &rows {
        println!("{}", row.report.table_row(&row.name));
    }
    if let Some(path) = cfg.output_path(out, "evaluation.jsonl") {
        jsonl::write_jsonl(&path, &header(cfg, "evaluation"), &rows).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn scorer(cfg: &RunConfig) -> Result<Option<Box<dyn PairScorer>>, Failure> {
    let Some(spec) = &cfg.scorer else { return Ok(None) };
    let scorer: Box<dyn PairScorer> = if let Some(cmd) = spec.strip_prefix("cmd:") {
        let mut parts = cmd.split_whitespace();
        let program = parts.next().ok_or_else(|| invalid("empty scorer command"))?;
        let args: Vec<String> = parts.map(str::to_string).collect();
        Box::new(ProcessScorer::spawn(program, &args).map_err(|e| Failure::Runtime(e.into()))?)
    } else {
        let addr = spec.strip_prefix("socket:").unwrap_or(spec);
        Box::new(SocketScorer::connect(addr).map_err(|e| Failure::Runtime(e.into()))?)
    };
    Ok(Some(scorer))
}

fn embeddings(cfg: &RunConfig) -> Result<(EmbeddingStore, EmbeddingStore), Failure> {
    let load = |p: &PathBuf| -> Result<EmbeddingStore, Failure> {
        Ok(EmbeddingStore::load(p).with_context(|| format!("reading embeddings {}", p.display()))?)
    };
    match (&cfg.url_embeddings, &cfg.paragraph_embeddings) {
        (Some(u), Some(p)) if u == p => {
            let store = load(u)?;
            Ok((store.clone(), store))
        }
        (Some(u), Some(p)) => Ok((load(u)?, load(p)?)),
        (Some(one), None) | (None, Some(one)) => {
            let store = load(one)?;
            Ok((store.clone(), store))
        }
        (None, None) => Err(invalid("scoring needs --url-embeddings and/or --paragraph-embeddings")),
    }
}

pub fn compare(cfg: &RunConfig, corpus: &Path, evidence: &[PathBuf], out: Option<&Path>, name: &str) -> Outcome {
    let threads = threads(corpus)?;
    let files = read_evidence(evidence)?;
    let (url_store, paragraph_store) = embeddings(cfg)?;
    let dict = dictionary(cfg)?;
    let scorer = scorer(cfg)?;

    let by_id: HashMap<&str, &ThreadEntry> = threads.iter().map(|t| (t.id(), t)).collect();
    let mut runs = Vec::new();
    for (file, records) in evidence.iter().zip(files) {
        let strategy = records
            .first()
            .map(|r| r.strategy)
            .or(cfg.strategy)
            .ok_or_else(|| invalid(format!("{} is empty and no --strategy was given", file.display())))?;
        let mut items = Vec::new();
        for r in records {
            let Some(thread) = by_id.get(r.thread_id.as_str()) else {
                warn!("{}: thread {} is not in the corpus", file.display(), r.thread_id);
                continue;
            };
            match preprocess(&thread.source) {
                Ok(rumour) => items.push(RetrievedItem {
                    rumour,
                    response_urls: thread.reaction_urls.clone(),
                    articles: r.articles,
                }),
                Err(e) => warn!("skipping: {e}"),
            }
        }
        runs.push(StrategyRun { strategy, items });
    }
    let comparison: MetricComparison =
        compare_strategies(&runs, &url_store, &paragraph_store, &dict, scorer.as_deref()).context("scoring retrieval")?;
    print!("{}", comparison.to_table());
    for (metric, order) in &comparison.orderings {
        let names: Vec<&str> = order.iter().map(|s| s.key()).collect();
        println!("{:<14} {}", metric.label(), names.join(" > "));
    }
    if comparison.orderings.len() > 1 {
        println!("orderings agree: {}", comparison.orders_agree());
    }
    if let Some(path) = cfg.output_path(out, name) {
        jsonl::write_jsonl(&path, &header(cfg, "metrics"), &[comparison]).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}
