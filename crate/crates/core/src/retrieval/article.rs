use chrono::{DateTime, Utc};
use once_cell::sync::Lazy;
use regex::Regex;
use scraper::{node::Node, ElementRef, Html, Selector};
use serde::{Deserialize, Serialize};

/// Minimum characters for a text run to count as a paragraph.
pub const MIN_PARAGRAPH_CHARS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArticleDoc {
    pub url: String,
    pub title: String,
    pub paragraphs: Vec<String>,
    pub retrieved_rank: usize,
    pub fetch_date: DateTime<Utc>,
    pub is_empty: bool,
}

impl ArticleDoc {
    /// Builds a document with `is_empty` derived from title and paragraphs.
    pub fn new(url: String, title: String, paragraphs: Vec<String>, retrieved_rank: usize, fetch_date: DateTime<Utc>) -> Self {
        let is_empty = title.trim().is_empty() || paragraphs.is_empty();
        Self {
            url,
            title,
            paragraphs,
            retrieved_rank,
            fetch_date,
            is_empty,
        }
    }

    /// Recomputes the emptiness flag; false when a deserialized record lies about it.
    pub fn is_consistent(&self) -> bool {
        self.is_empty == (self.title.trim().is_empty() || self.paragraphs.is_empty())
    }
}

/// Extracts a document from an HTML page or a plain-text blob, stamped with the current time.
pub fn extract_article(blob: &str, url: &str) -> ArticleDoc {
    extract_article_at(blob, url, 0, Utc::now())
}

pub fn extract_article_at(blob: &str, url: &str, rank: usize, fetch_date: DateTime<Utc>) -> ArticleDoc {
    let (title, paragraphs) = if looks_like_html(blob) {
        from_html(blob)
    } else {
        from_text(blob)
    };
    ArticleDoc::new(url.to_string(), title, paragraphs, rank, fetch_date)
}

static TAG: Lazy<Regex> = Lazy::new(|| Regex::new(r"(?i)<\s*(html|head|body|p|div|title|h[1-6]|article|section|meta|br)\b").unwrap());
static SPACE: Lazy<Regex> = Lazy::new(|| Regex::new(r"\s+").unwrap());

fn looks_like_html(blob: &str) -> bool {
    TAG.is_match(blob)
}

fn squash(text: &str) -> String {
    SPACE.replace_all(text.trim(), " ").into_owned()
}

const SKIPPED_TAGS: &[&str] = &[
    "nav", "footer", "header", "aside", "script", "style", "noscript", "form", "head", "iframe", "svg", "button", "select",
    "template", "h1",
];

const BLOCK_TAGS: &[&str] = &[
    "p", "div", "li", "ul", "ol", "blockquote", "pre", "h2", "h3", "h4", "h5", "h6", "td", "th", "tr", "table", "article",
    "section", "main", "figure", "figcaption", "dd", "dt", "br", "hr", "body",
];

const BOILERPLATE_MARKERS: &[&str] = &[
    "nav", "menu", "footer", "sidebar", "cookie", "share", "social", "subscribe", "newsletter", "breadcrumb", "banner",
    "advert", "promo", "related", "masthead", "copyright",
];

fn is_boilerplate(el: &scraper::node::Element) -> bool {
    if SKIPPED_TAGS.contains(&el.name()) {
        return true;
    }
    if el.attr("role").is_some_and(|r| r == "navigation" || r == "contentinfo" || r == "banner") {
        return true;
    }
    let mut labels = String::new();
    if let Some(id) = el.id() {
        labels.push_str(id);
        labels.push(' ');
    }
    for class in el.classes() {
        labels.push_str(class);
        labels.push(' ');
    }
    let labels = labels.to_ascii_lowercase();
    labels
        .split(|c: char| !c.is_ascii_alphanumeric())
        .filter(|w| !w.is_empty())
        .any(|w| BOILERPLATE_MARKERS.iter().any(|m| w == *m || w.starts_with(m)))
}

fn from_html(blob: &str) -> (String, Vec<String>) {
    let doc = Html::parse_document(blob);
    let mut runs = Vec::new();
    let mut current = String::new();
    walk(doc.root_element(), &mut current, &mut runs);
    flush(&mut current, &mut runs);
    (html_title(&doc), runs)
}

fn walk(el: ElementRef<'_>, current: &mut String, runs: &mut Vec<String>) {
    for child in el.children() {
        if let Some(child_el) = ElementRef::wrap(child) {
            let value = child_el.value();
            if is_boilerplate(value) {
                continue;
            }
            let block = BLOCK_TAGS.contains(&value.name());
            if block {
                flush(current, runs);
            }
            walk(child_el, current, runs);
            if block {
                flush(current, runs);
            }
        } else if let Node::Text(text) = child.value() {
            current.push_str(text);
        }
    }
}

fn flush(current: &mut String, runs: &mut Vec<String>) {
    let text = squash(current);
    current.clear();
    if text.chars().count() >= MIN_PARAGRAPH_CHARS {
        runs.push(text);
    }
}

fn select_text(doc: &Html, css: &str) -> Option<String> {
    let selector = Selector::parse(css).expect("static selector");
    doc.select(&selector)
        .map(|el| squash(&el.text().collect::<String>()))
        .find(|t| !t.is_empty())
}

fn html_title(doc: &Html) -> String {
    if let Some(t) = select_text(doc, "title") {
        return t;
    }
    let og = Selector::parse(r#"meta[property="og:title"]"#).expect("static selector");
    if let Some(t) = doc
        .select(&og)
        .filter_map(|m| m.value().attr("content"))
        .map(squash)
        .find(|t| !t.is_empty())
    {
        return t;
    }
    select_text(doc, "h1").unwrap_or_default()
}

/// Plain text: first non-blank line is the title, blank-line separated blocks are paragraphs.
fn from_text(blob: &str) -> (String, Vec<String>) {
    let mut lines = blob.lines();
    let mut title = String::new();
    for line in lines.by_ref() {
        if !line.trim().is_empty() {
            title = squash(line);
            break;
        }
    }
    let rest: Vec<&str> = lines.collect();
    let mut paragraphs = Vec::new();
    let mut current = String::new();
    for line in rest {
        if line.trim().is_empty() {
            flush(&mut current, &mut paragraphs);
        } else {
            current.push_str(line);
            current.push(' ');
        }
    }
    flush(&mut current, &mut paragraphs);
    (title, paragraphs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn titled_page_with_two_paragraphs() {
        let html = "<html><head><title>Siege ends</title></head><body>\
            <p>Police stormed the cafe in the early hours of the morning.</p>\
            <p>Two hostages and the gunman were killed in the operation.</p></body></html>";
        let doc = extract_article(html, "https://example.org/siege");
        assert_eq!(doc.title, "Siege ends");
        assert_eq!(doc.paragraphs.len(), 2);
        assert!(!doc.is_empty);
    }

    #[test]
    fn missing_title_is_empty() {
        let html = "<html><body><p>Police stormed the cafe in the early hours of the morning.</p></body></html>";
        let doc = extract_article(html, "https://example.org/x");
        assert!(doc.title.is_empty());
        assert!(doc.is_empty);
    }

    #[test]
    fn short_runs_are_not_paragraphs() {
        let html = "<html><head><title>T</title></head><body><p>Too short.</p><div>Share this</div></body></html>";
        let doc = extract_article(html, "u");
        assert!(doc.paragraphs.is_empty());
        assert!(doc.is_empty);
    }

    #[test]
    fn og_title_and_h1_fallbacks() {
        let og = r#"<html><head><meta property="og:title" content="Gunman named"></head><body><p>x</p></body></html>"#;
        assert_eq!(extract_article(og, "u").title, "Gunman named");
        let h1 = "<html><body><h1>Crash site found</h1><p>Search teams reached the wreckage by helicopter.</p></body></html>";
        let doc = extract_article(h1, "u");
        assert_eq!(doc.title, "Crash site found");
        assert_eq!(doc.paragraphs, vec!["Search teams reached the wreckage by helicopter."]);
    }

    #[test]
    fn plain_text_blob() {
        let doc = extract_article("Siege ends\n\nPolice stormed the cafe overnight, officials said.\n\nok\n", "u");
        assert_eq!(doc.title, "Siege ends");
        assert_eq!(doc.paragraphs, vec!["Police stormed the cafe overnight, officials said."]);
    }

    #[test]
    fn inline_markup_stays_in_one_paragraph() {
        let html = "<html><head><title>T</title></head><body><p>The <b>suspects</b> were <a href='#'>cornered</a> near Paris.</p></body></html>";
        let doc = extract_article(html, "u");
        assert_eq!(doc.paragraphs, vec!["The suspects were cornered near Paris."]);
    }
}
