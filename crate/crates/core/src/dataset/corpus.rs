use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, NaiveDate};
use once_cell::sync::Lazy;
use rayon::prelude::*;
use regex::Regex;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::DatasetError;
use crate::jsonl;
use crate::text_prep::{RawTweet, URL_PATTERN};
use crate::types::{Event, Label};

pub const THREADS_KIND: &str = "threads";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThreadEntry {
    pub source: RawTweet,
    pub reactions: Vec<RawTweet>,
    /// URLs linked from reactions, in reaction order.
    pub reaction_urls: Vec<String>,
    pub label: Label,
    pub event: Event,
}

impl ThreadEntry {
    pub fn id(&self) -> &str {
        &self.source.id
    }
}

/// Loads threads from a PHEME-style directory tree or a threads JSON Lines file.
pub fn load_corpus(root: impl AsRef<Path>) -> Result<Vec<ThreadEntry>, DatasetError> {
    let root = root.as_ref();
    if root.is_file() {
        Ok(jsonl::read_records(root, THREADS_KIND)?)
    } else {
        load_pheme(root)
    }
}

fn io(path: &Path) -> impl Fn(std::io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn subdirs(dir: &Path) -> Result<Vec<PathBuf>, DatasetError> {
    let mut dirs = Vec::new();
    for entry in fs::read_dir(dir).map_err(io(dir))? {
        let path = entry.map_err(io(dir))?.path();
        if path.is_dir() {
            dirs.push(path);
        }
    }
    dirs.sort();
    Ok(dirs)
}

fn name(path: &Path) -> String {
    path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Walks `<root>/<event>/[rumours/]<thread>/{source-tweets,reactions}/*.json`
/// with an `annotation.json` per thread. `non-rumours` folders are skipped.
pub fn load_pheme(root: &Path) -> Result<Vec<ThreadEntry>, DatasetError> {
    let mut jobs = Vec::new();
    for dir in subdirs(root)? {
        let Some(event) = Event::from_dir_name(&name(&dir)) else { continue };
        let rumours = dir.join("rumours");
        let base = if rumours.is_dir() { rumours } else { dir.clone() };
        for thread in subdirs(&base)? {
            if thread.join("source-tweets").is_dir() {
                jobs.push((event, thread));
            }
        }
    }
    if jobs.is_empty() {
        return Err(DatasetError::NoEvents(root.display().to_string()));
    }
    let mut threads = jobs
        .par_iter()
        .map(|(event, dir)| load_thread(*event, dir))
        .collect::<Result<Vec<_>, _>>()?;
    threads.sort_by(|a, b| a.event.cmp(&b.event).then_with(|| a.id().cmp(b.id())));
    Ok(threads)
}

fn json_files(dir: &Path) -> Result<Vec<PathBuf>, DatasetError> {
    if !dir.is_dir() {
        return Ok(Vec::new());
    }
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(io(dir))? {
        let path = entry.map_err(io(dir))?.path();
        let hidden = name(&path).starts_with('.');
        if path.is_file() && !hidden && path.extension().is_some_and(|e| e == "json") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

fn load_thread(event: Event, dir: &Path) -> Result<ThreadEntry, DatasetError> {
    let thread_id = name(dir);
    let sources = json_files(&dir.join("source-tweets"))?;
    let source_file = sources.first().ok_or_else(|| DatasetError::MalformedTweet {
        file: dir.join("source-tweets").display().to_string(),
        reason: "no source tweet".into(),
    })?;
    let (source, _) = read_tweet(source_file, event)?;
    let label = read_label(&dir.join("annotation.json"), &thread_id)?;

    let mut reactions = Vec::new();
    for file in json_files(&dir.join("reactions"))? {
        let (tweet, urls) = read_tweet(&file, event)?;
        if tweet.id != source.id {
            reactions.push((tweet, urls));
        }
    }
    reactions.sort_by(|a, b| a.0.created_at.cmp(&b.0.created_at).then_with(|| a.0.id.cmp(&b.0.id)));
    let reaction_urls = reactions.iter().flat_map(|(_, urls)| urls.iter().cloned()).collect();
    Ok(ThreadEntry {
        source,
        reactions: reactions.into_iter().map(|(t, _)| t).collect(),
        reaction_urls,
        label,
        event,
    })
}

/// Parses Twitter's `Wed Jan 07 11:06:08 +0000 2015` or an RFC 3339 timestamp to a UTC date.
pub fn parse_twitter_date(raw: &str) -> Option<NaiveDate> {
    if let Ok(t) = DateTime::parse_from_str(raw, "%a %b %d %H:%M:%S %z %Y") {
        return Some(t.naive_utc().date());
    }
    if let Ok(t) = DateTime::parse_from_rfc3339(raw) {
        return Some(t.naive_utc().date());
    }
    NaiveDate::parse_from_str(raw, "%Y-%m-%d").ok()
}

static URL_RE: Lazy<Regex> = Lazy::new(|| Regex::new(URL_PATTERN).unwrap());

/// Reads one tweet object, returning it with the URLs it links to.
/// Expanded entity URLs are preferred over the shortened links in the text.
fn read_tweet(path: &Path, event: Event) -> Result<(RawTweet, Vec<String>), DatasetError> {
    let bad = |reason: String| DatasetError::MalformedTweet {
        file: path.display().to_string(),
        reason,
    };
    let text = fs::read_to_string(path).map_err(io(path))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
    let id = match (&v["id_str"], &v["id"]) {
        (Value::String(s), _) => s.clone(),
        (_, Value::Number(n)) => n.to_string(),
        (_, Value::String(s)) => s.clone(),
        _ => return Err(bad("no id".into())),
    };
    let body = v["full_text"]
        .as_str()
        .or_else(|| v["text"].as_str())
        .ok_or_else(|| bad("no text".into()))?
        .to_string();
    let created = v["created_at"].as_str().ok_or_else(|| bad("no created_at".into()))?;
    let created_at = parse_twitter_date(created).ok_or_else(|| bad(format!("bad created_at {created:?}")))?;
    let author_handle = v["user"]["screen_name"].as_str().unwrap_or_default().to_string();

    let mut urls: Vec<String> = v["entities"]["urls"]
        .as_array()
        .map(|list| {
            list.iter()
                .filter_map(|u| u["expanded_url"].as_str().or_else(|| u["url"].as_str()))
                .map(str::to_string)
                .collect()
        })
        .unwrap_or_default();
    if urls.is_empty() {
        urls = URL_RE.find_iter(&body).map(|m| m.as_str().to_string()).collect();
    }
    let tweet = RawTweet {
        id,
        text: body,
        created_at,
        event,
        author_handle,
    };
    Ok((tweet, urls))
}

fn flag(v: &Value) -> Option<bool> {
    match v {
        Value::String(s) => s.trim().parse::<i64>().ok().map(|n| n != 0),
        Value::Number(n) => n.as_i64().map(|n| n != 0),
        Value::Bool(b) => Some(*b),
        _ => None,
    }
}

/// `misinformation = 1` is False, `true = 1` is True, both 0 is Unverified.
fn read_label(path: &Path, thread_id: &str) -> Result<Label, DatasetError> {
    let missing = || DatasetError::MissingAnnotation {
        thread_id: thread_id.to_string(),
    };
    let text = fs::read_to_string(path).map_err(|_| missing())?;
    let v: Value = serde_json::from_str(&text).map_err(|e| DatasetError::MalformedTweet {
        file: path.display().to_string(),
        reason: e.to_string(),
    })?;
    let misinformation = flag(&v["misinformation"]);
    let is_true = flag(&v["true"]);
    match (misinformation, is_true) {
        (None, None) => Err(missing()),
        (Some(true), Some(true)) => Err(DatasetError::ConflictingAnnotation {
            thread_id: thread_id.to_string(),
        }),
        (Some(true), _) => Ok(Label::False),
        (_, Some(true)) => Ok(Label::True),
        _ => Ok(Label::Unverified),
    }
}
