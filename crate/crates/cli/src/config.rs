use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use rumour_evidence::select::SelectionConfig;
use rumour_evidence::stopwords;
use rumour_evidence::Strategy;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Settings shared by every subcommand, from an optional TOML file and flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub strategy: Option<Strategy>,
    /// `live` or `offline:<path>`.
    pub backend: Option<String>,
    pub url_embeddings: Option<PathBuf>,
    pub paragraph_embeddings: Option<PathBuf>,
    pub dictionary: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub top_k: Option<usize>,
    pub min_len: Option<usize>,
    pub max_len: Option<usize>,
    pub penalty_per_word: Option<f64>,
    pub max_results: Option<usize>,
    pub passes: Option<usize>,
    pub rate_limit: Option<f64>,
    /// `cmd:<program> [args..]` or `socket:<addr>`.
    pub scorer: Option<String>,
    pub output_dir: Option<PathBuf>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ConfigFlags {
    /// TOML file with run settings; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Query strategy: preprocessed, deprel or triple.
    #[arg(long, global = true)]
    pub strategy: Option<Strategy>,
    /// Search backend: live or offline:<corpus.jsonl>.
    #[arg(long, global = true)]
    pub backend: Option<String>,
    /// Word vectors for URL Words scoring (word2vec text format).
    #[arg(long, global = true)]
    pub url_embeddings: Option<PathBuf>,
    /// Word vectors for title and paragraph scoring; falls back to the URL vectors.
    #[arg(long, global = true)]
    pub paragraph_embeddings: Option<PathBuf>,
    /// Word frequency list for hashtag segmentation.
    #[arg(long, global = true)]
    pub dictionary: Option<PathBuf>,
    /// Stopword list, one word per line; the built-in English list otherwise.
    #[arg(long, global = true)]
    pub stopwords: Option<PathBuf>,
    /// Evidence sentences kept per rumour [default: 5].
    #[arg(long, global = true)]
    pub top_k: Option<usize>,
    /// Sentences shorter than this many words score zero [default: 5].
    #[arg(long, global = true)]
    pub min_len: Option<usize>,
    /// Length in words beyond which the score is penalised [default: 20].
    #[arg(long, global = true)]
    pub max_len: Option<usize>,
    /// Score fraction lost per word over the maximum [default: 0.02].
    #[arg(long, global = true)]
    pub penalty_per_word: Option<f64>,
    /// Non-empty results collected per search pass.
    #[arg(long, global = true)]
    pub max_results: Option<usize>,
    /// Search passes per rumour; articles are capped at ten.
    #[arg(long, global = true)]
    pub passes: Option<usize>,
    /// Requests per second per host for the live backend.
    #[arg(long, global = true)]
    pub rate_limit: Option<f64>,
    /// External pair scorer: cmd:<program> [args..] or socket:<addr>.
    #[arg(long, global = true)]
    pub scorer: Option<String>,
    /// Directory for output files not given an explicit --out.
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
    /// Seed recorded in output headers [default: 0].
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

fn resolve(base: &Path, p: Option<PathBuf>) -> Option<PathBuf> {
    p.map(|p| if p.is_relative() { base.join(p) } else { p })
}

fn resolve_backend(base: &Path, b: Option<String>) -> Option<String> {
    b.map(|b| match b.strip_prefix("offline:") {
        Some(path) if Path::new(path).is_relative() => format!("offline:{}", base.join(path).display()),
        _ => b,
    })
}

impl RunConfig {
    /// Loads the config file, if any, and lays the flags over it. Relative
    /// paths in the file are taken from the file's directory.
    pub fn from_flags(flags: &ConfigFlags) -> Result<Self> {
        let mut cfg = match &flags.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
                let file: RunConfig = toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
                let base = path.parent().unwrap_or(Path::new("."));
                RunConfig {
                    backend: resolve_backend(base, file.backend),
                    url_embeddings: resolve(base, file.url_embeddings),
                    paragraph_embeddings: resolve(base, file.paragraph_embeddings),
                    dictionary: resolve(base, file.dictionary),
                    stopwords: resolve(base, file.stopwords),
                    output_dir: resolve(base, file.output_dir),
                    ..file
                }
            }
            None => RunConfig::default(),
        };
        let f = flags.clone();
        macro_rules! over {
            ($($field:ident),*) => { $(if f.$field.is_some() { cfg.$field = f.$field; })* };
        }
        over!(
            strategy,
            backend,
            url_embeddings,
            paragraph_embeddings,
            dictionary,
            stopwords,
            top_k,
            min_len,
            max_len,
            penalty_per_word,
            max_results,
            passes,
            rate_limit,
            scorer,
            output_dir,
            seed
        );
        cfg.validate()?;
        Ok(cfg)
    }

    /// Referenced files must exist and numeric settings must be usable.
    pub fn validate(&self) -> Result<()> {
        for (name, path) in [
            ("url_embeddings", &self.url_embeddings),
            ("paragraph_embeddings", &self.paragraph_embeddings),
            ("dictionary", &self.dictionary),
            ("stopwords", &self.stopwords),
        ] {
            if let Some(p) = path {
                if !p.is_file() {
                    bail!("{name}: {} does not exist", p.display());
                }
            }
        }
        if let Some(b) = &self.backend {
            match b.strip_prefix("offline:") {
                Some(p) if !Path::new(p).is_file() => bail!("backend: offline corpus {p} does not exist"),
                Some(_) => {}
                None if b == "live" => {}
                None => bail!("backend must be `live` or `offline:<path>`, got `{b}`"),
            }
        }
        if let Some(s) = &self.scorer {
            if !(s.starts_with("cmd:") || s.starts_with("socket:")) {
                bail!("scorer must be `cmd:<program>` or `socket:<addr>`, got `{s}`");
            }
        }
        if self.max_results == Some(0) {
            bail!("max_results must be at least 1");
        }
        if matches!(self.passes, Some(p) if p == 0 || p > 10) {
            bail!("passes must be between 1 and 10");
        }
        if matches!(self.rate_limit, Some(r) if !(r > 0.0 && r.is_finite())) {
            bail!("rate_limit must be a positive number");
        }
        self.selection()?.validate()?;
        Ok(())
    }

    pub fn selection(&self) -> Result<SelectionConfig> {
        let d = SelectionConfig::default();
        let stopwords = match &self.stopwords {
            Some(p) => stopwords::load(p).with_context(|| format!("reading stopwords {}", p.display()))?,
            None => d.stopwords.clone(),
        };
        Ok(SelectionConfig {
            min_len: self.min_len.unwrap_or(d.min_len),
            max_len: self.max_len.unwrap_or(d.max_len),
            penalty_per_word: self.penalty_per_word.unwrap_or(d.penalty_per_word),
            top_k: self.top_k.unwrap_or(d.top_k),
            stopwords,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn max_results(&self) -> usize {
        self.max_results.unwrap_or(5)
    }

    pub fn passes(&self) -> usize {
        self.passes.unwrap_or(2)
    }

    /// SHA-256 over every setting that can change file contents; the output
    /// directory is left out so runs into different directories compare equal.
    pub fn hash(&self) -> String {
        let hashed = RunConfig {
            output_dir: None,
            ..self.clone()
        };
        let json = serde_json::to_string(&hashed).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    /// `out` as given, or `name` inside the output directory.
    pub fn output_path(&self, out: Option<&Path>, name: &str) -> Option<PathBuf> {
        match (out, &self.output_dir) {
            (Some(p), _) => Some(p.to_path_buf()),
            (None, Some(dir)) => Some(dir.join(name)),
            (None, None) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_and_paths_resolve() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("dict.tsv"), "paris\t3\n").unwrap();
        std::fs::write(
            dir.path().join("run.toml"),
            "strategy = \"deprel\"\ndictionary = \"dict.tsv\"\ntop_k = 3\nseed = 9\n",
        )
        .unwrap();
        let flags = ConfigFlags {
            config: Some(dir.path().join("run.toml")),
            top_k: Some(4),
            ..ConfigFlags::default()
        };
        let cfg = RunConfig::from_flags(&flags).unwrap();
        assert_eq!(cfg.strategy, Some(Strategy::DeprelShortened));
        assert_eq!(cfg.top_k, Some(4));
        assert_eq!(cfg.seed(), 9);
        assert_eq!(cfg.dictionary, Some(dir.path().join("dict.tsv")));
    }

    #[test]
    fn missing_files_and_bad_values_fail_validation() {
        let cfg = RunConfig {
            dictionary: Some("/no/such/file".into()),
            ..RunConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = RunConfig {
            min_len: Some(30),
            ..RunConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = RunConfig {
            backend: Some("bing".into()),
            ..RunConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn hash_ignores_output_dir_only() {
        let a = RunConfig {
            seed: Some(1),
            output_dir: Some("a".into()),
            ..RunConfig::default()
        };
        let b = RunConfig {
            output_dir: Some("b".into()),
            ..a.clone()
        };
        assert_eq!(a.hash(), b.hash());
        let c = RunConfig { seed: Some(2), ..a.clone() };
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
