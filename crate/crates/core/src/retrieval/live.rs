use std::collections::HashMap;
use std::sync::{Condvar, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use chrono::Utc;
use serde_json::Value;

use super::{extract_article_at, ArticleDoc, BackendDescriptor, RetrievalError, SearchBackend, SearchResult};
use crate::query::Query;

const LIVE_NAME: &str = "live";

#[derive(Debug, Clone)]
pub struct LiveConfig {
    /// Search API endpoint, queried as `GET endpoint?q=..&start=..&num=..`.
    pub endpoint: String,
    pub api_key: Option<String>,
    /// When set, the cutoff goes in this query parameter instead of a
    /// `before:` operator in the query text.
    pub date_param: Option<String>,
    pub requests_per_second: f64,
    pub max_in_flight: usize,
    pub attempts: u32,
    pub backoff: Duration,
    pub timeout: Duration,
}

impl LiveConfig {
    pub fn new(endpoint: impl Into<String>) -> Self {
        Self {
            endpoint: endpoint.into(),
            api_key: None,
            date_param: None,
            requests_per_second: 1.0,
            max_in_flight: 4,
            attempts: 3,
            backoff: Duration::from_secs(1),
            timeout: Duration::from_secs(30),
        }
    }

    /// Reads RUMOUR_SEARCH_ENDPOINT, RUMOUR_SEARCH_API_KEY and RUMOUR_SEARCH_DATE_PARAM.
    pub fn from_env() -> Result<Self, RetrievalError> {
        let endpoint = std::env::var("RUMOUR_SEARCH_ENDPOINT")
            .map_err(|_| RetrievalError::Config("RUMOUR_SEARCH_ENDPOINT is not set".into()))?;
        let mut cfg = Self::new(endpoint);
        cfg.api_key = std::env::var("RUMOUR_SEARCH_API_KEY").ok();
        cfg.date_param = std::env::var("RUMOUR_SEARCH_DATE_PARAM").ok().filter(|p| !p.is_empty());
        Ok(cfg)
    }
}

/// Counting semaphore bounding concurrent requests.
struct Slots {
    free: Mutex<usize>,
    ready: Condvar,
}

struct SlotGuard<'a>(&'a Slots);

impl Slots {
    fn acquire(&self) -> SlotGuard<'_> {
        let mut free = self.free.lock().unwrap();
        while *free == 0 {
            free = self.ready.wait(free).unwrap();
        }
        *free -= 1;
        SlotGuard(self)
    }
}

impl Drop for SlotGuard<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().unwrap() += 1;
        self.0.ready.notify_one();
    }
}

/// HTTP client over a JSON search API. Responses are read from `items[].link`
/// or `results[].url`.
pub struct LiveBackend {
    config: LiveConfig,
    agent: ureq::Agent,
    descriptor: BackendDescriptor,
    next_slot: Mutex<HashMap<String, Instant>>,
    slots: Slots,
}

impl LiveBackend {
    pub fn new(config: LiveConfig) -> Result<Self, RetrievalError> {
        url::Url::parse(&config.endpoint).map_err(|e| RetrievalError::Config(format!("endpoint {}: {e}", config.endpoint)))?;
        if config.max_in_flight == 0 || config.attempts == 0 || config.requests_per_second.is_nan() || config.requests_per_second <= 0.0 {
            return Err(RetrievalError::Config("max_in_flight, attempts and rate must be positive".into()));
        }
        let agent = ureq::AgentBuilder::new().timeout(config.timeout).build();
        Ok(Self {
            slots: Slots {
                free: Mutex::new(config.max_in_flight),
                ready: Condvar::new(),
            },
            config,
            agent,
            descriptor: BackendDescriptor {
                name: LIVE_NAME.to_string(),
                supports_date_filter: true,
            },
            next_slot: Mutex::new(HashMap::new()),
        })
    }

    /// Blocks until the host's politeness interval has elapsed.
    fn wait_turn(&self, url: &str) {
        let host = url::Url::parse(url)
            .ok()
            .and_then(|u| u.host_str().map(str::to_string))
            .unwrap_or_default();
        let interval = Duration::from_secs_f64(1.0 / self.config.requests_per_second);
        let wait = {
            let mut slots = self.next_slot.lock().unwrap();
            let now = Instant::now();
            let at = slots.get(&host).copied().unwrap_or(now).max(now);
            slots.insert(host, at + interval);
            at - now
        };
        if !wait.is_zero() {
            thread::sleep(wait);
        }
    }

    fn get(&self, url: &str, params: &[(&str, String)]) -> Result<String, RetrievalError> {
        let _slot = self.slots.acquire();
        let mut last = String::new();
        for attempt in 0..self.config.attempts {
            if attempt > 0 {
                thread::sleep(self.config.backoff * 2u32.pow(attempt - 1));
            }
            self.wait_turn(url);
            let mut req = self.agent.get(url);
            for (k, v) in params {
                req = req.query(k, v);
            }
            match req.call() {
                Ok(resp) => return resp.into_string().map_err(RetrievalError::Io),
                Err(ureq::Error::Status(429, _)) => {
                    return Err(RetrievalError::QuotaExceeded {
                        backend: LIVE_NAME.to_string(),
                    })
                }
                Err(ureq::Error::Status(code, _)) if code < 500 => {
                    return Err(RetrievalError::BackendUnavailable {
                        backend: LIVE_NAME.to_string(),
                        reason: format!("{url}: HTTP {code}"),
                    })
                }
                Err(e) => last = e.to_string(),
            }
        }
        Err(RetrievalError::BackendUnavailable {
            backend: LIVE_NAME.to_string(),
            reason: format!("{url}: {} attempts failed, last: {last}", self.config.attempts),
        })
    }

    fn query_params(&self, query: &Query, start: usize, count: usize) -> Vec<(&str, String)> {
        let mut params = Vec::new();
        match &self.config.date_param {
            Some(name) => {
                let text = query.render();
                let text = text.split_once(' ').map_or("", |(_, rest)| rest).to_string();
                params.push(("q", text));
                params.push((name.as_str(), query.date_cutoff.format("%Y-%m-%d").to_string()));
            }
            None => params.push(("q", query.render())),
        }
        params.push(("start", start.to_string()));
        params.push(("num", count.to_string()));
        if let Some(key) = &self.config.api_key {
            params.push(("key", key.clone()));
        }
        params
    }
}

fn result_urls(body: &str) -> Result<Vec<String>, RetrievalError> {
    let value: Value = serde_json::from_str(body).map_err(|e| RetrievalError::BackendUnavailable {
        backend: LIVE_NAME.to_string(),
        reason: format!("unreadable search response: {e}"),
    })?;
    let pick = |list: &str, field: &str| -> Option<Vec<String>> {
        value.get(list)?.as_array().map(|items| {
            items
                .iter()
                .filter_map(|i| i.get(field).and_then(Value::as_str).map(str::to_string))
                .collect()
        })
    };
    Ok(pick("items", "link").or_else(|| pick("results", "url")).unwrap_or_default())
}

impl SearchBackend for LiveBackend {
    fn descriptor(&self) -> &BackendDescriptor {
        &self.descriptor
    }

    fn results(&self, query: &Query, start: usize, count: usize) -> Result<Vec<SearchResult>, RetrievalError> {
        let body = self.get(&self.config.endpoint, &self.query_params(query, start, count))?;
        Ok(result_urls(&body)?
            .into_iter()
            .take(count)
            .enumerate()
            .map(|(i, url)| SearchResult {
                url,
                rank: start + i,
                backend_name: LIVE_NAME.to_string(),
            })
            .collect())
    }

    fn fetch(&self, hit: &SearchResult) -> Result<ArticleDoc, RetrievalError> {
        let body = self.get(&hit.url, &[])?;
        Ok(extract_article_at(&body, &hit.url, hit.rank, Utc::now()))
    }
}
