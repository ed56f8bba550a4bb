use std::collections::HashMap;
use std::io::BufRead;
use std::path::Path;

use super::DatasetError;

fn is_tracking(param: &str) -> bool {
    let key = param.split('=').next().unwrap_or("").to_ascii_lowercase();
    key.starts_with("utm_") || key == "fbclid" || key == "gclid"
}

/// Canonical form for URL comparison: lowercase scheme and host without
/// `www.`, no fragment, no tracking parameters, no trailing slash. Path case
/// is preserved.
pub fn normalize_url(raw: &str) -> Result<String, DatasetError> {
    let bad = || DatasetError::UnparseableUrl(raw.to_string());
    let parsed = url::Url::parse(raw.trim()).map_err(|_| bad())?;
    let mut host = parsed.host_str().filter(|h| !h.is_empty()).ok_or_else(bad)?.to_ascii_lowercase();
    while let Some(rest) = host.strip_prefix("www.") {
        host = rest.to_string();
    }
    if host.is_empty() {
        return Err(bad());
    }
    let mut out = format!("{}://{}", parsed.scheme(), host);
    if let Some(port) = parsed.port() {
        out.push_str(&format!(":{port}"));
    }
    out.push_str(parsed.path().trim_end_matches('/'));
    if let Some(query) = parsed.query() {
        let kept: Vec<&str> = query.split('&').filter(|p| !p.is_empty() && !is_tracking(p)).collect();
        if !kept.is_empty() {
            out.push('?');
            out.push_str(&kept.join("&"));
        }
    }
    Ok(out)
}

/// Normalizes URLs after resolving shortened links through an expansion map.
#[derive(Debug, Clone, Default)]
pub struct UrlCanonicalizer {
    expansions: HashMap<String, String>,
}

impl UrlCanonicalizer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_expansions<I, S, T>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, T)>,
        S: AsRef<str>,
        T: Into<String>,
    {
        let mut c = Self::default();
        for (short, long) in pairs {
            c.add_expansion(short.as_ref(), long.into());
        }
        c
    }

    pub fn add_expansion(&mut self, short: &str, long: String) {
        let key = normalize_url(short).unwrap_or_else(|_| short.trim().to_string());
        self.expansions.insert(key, long);
    }

    /// Reads `short<TAB>expanded` lines.
    pub fn from_reader(reader: impl BufRead) -> Result<Self, DatasetError> {
        let mut c = Self::default();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|source| DatasetError::Io {
                path: "expansion map".into(),
                source,
            })?;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (short, long) = line.split_once('\t').ok_or(DatasetError::MalformedExpansion {
                line: i + 1,
                reason: "expected short<TAB>expanded".into(),
            })?;
            c.add_expansion(short, long.trim().to_string());
        }
        Ok(c)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, DatasetError> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|source| DatasetError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_reader(std::io::BufReader::new(file))
    }

    /// Canonical key; unparseable input falls back to its trimmed text.
    pub fn canonical(&self, url: &str) -> String {
        let normalized = normalize_url(url).unwrap_or_else(|_| url.trim().to_string());
        match self.expansions.get(&normalized) {
            Some(long) => normalize_url(long).unwrap_or_else(|_| long.trim().to_string()),
            None => normalized,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_examples() {
        assert_eq!(normalize_url("HTTPS://WWW.CNN.com/story/").unwrap(), "https://cnn.com/story");
        assert_eq!(normalize_url("http://a.com/x?utm_source=t").unwrap(), "http://a.com/x");
    }

    #[test]
    fn keeps_path_case_and_real_parameters() {
        assert_eq!(
            normalize_url("http://Example.COM/News/Story?id=5&utm_medium=x&fbclid=1#top").unwrap(),
            "http://example.com/News/Story?id=5"
        );
        assert_eq!(normalize_url("https://bbc.co.uk").unwrap(), "https://bbc.co.uk");
        assert_eq!(normalize_url("http://a.com:8080/").unwrap(), "http://a.com:8080");
    }

    #[test]
    fn rejects_non_urls() {
        assert!(normalize_url("not a url").is_err());
        assert!(normalize_url("mailto:x@y.com").is_err());
    }

    #[test]
    fn expansion_map_unifies_short_links() {
        let map = "http://t.co/abc\thttps://www.cnn.com/2015/01/09/paris/?utm_source=twitter\n";
        let c = UrlCanonicalizer::from_reader(map.as_bytes()).unwrap();
        assert_eq!(c.canonical("http://t.co/abc"), c.canonical("https://cnn.com/2015/01/09/paris#x"));
        assert_eq!(c.canonical("junk"), "junk");
    }
}
