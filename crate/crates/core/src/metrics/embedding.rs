use std::collections::HashMap;
use std::io::BufRead;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("embedding line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("embedding line {line}: expected {expected} components, found {found}")]
    DimensionMismatch { line: usize, expected: usize, found: usize },
}

/// Word vectors keyed by lowercase word.
#[derive(Debug, Clone, Default)]
pub struct EmbeddingStore {
    dimension: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl EmbeddingStore {
    /// Builds a store from in-memory vectors; the first entry fixes the dimension.
    /// Later duplicates of a lowercased word are ignored.
    pub fn from_vectors<I, S>(entries: I) -> Result<Self, EmbeddingError>
    where
        I: IntoIterator<Item = (S, Vec<f64>)>,
        S: AsRef<str>,
    {
        let mut store = Self::default();
        for (i, (word, vector)) in entries.into_iter().enumerate() {
            store.insert(i + 1, word.as_ref(), vector)?;
        }
        Ok(store)
    }

    fn insert(&mut self, line: usize, word: &str, vector: Vec<f64>) -> Result<(), EmbeddingError> {
        if self.vectors.is_empty() {
            if vector.is_empty() {
                return Err(EmbeddingError::Malformed {
                    line,
                    reason: "no vector components".into(),
                });
            }
            self.dimension = vector.len();
        } else if vector.len() != self.dimension {
            return Err(EmbeddingError::DimensionMismatch {
                line,
                expected: self.dimension,
                found: vector.len(),
            });
        }
        if let Some(bad) = vector.iter().find(|v| !v.is_finite()) {
            return Err(EmbeddingError::Malformed {
                line,
                reason: format!("non-finite component {bad}"),
            });
        }
        self.vectors.entry(word.to_lowercase()).or_insert(vector);
        Ok(())
    }

    /// Reads the whitespace-separated text layout `word v1 v2 ... vd`.
    pub fn from_reader(reader: impl BufRead) -> Result<Self, EmbeddingError> {
        let mut store = Self::default();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let mut fields = line.split_whitespace();
            let Some(word) = fields.next() else { continue };
            let vector = fields
                .map(|f| f.parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| EmbeddingError::Malformed {
                    line: i + 1,
                    reason: e.to_string(),
                })?;
            store.insert(i + 1, word, vector)?;
        }
        Ok(store)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, EmbeddingError> {
        let file = std::fs::File::open(path)?;
        Self::from_reader(std::io::BufReader::new(file))
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Case-insensitive lookup; `None` for unknown words.
    pub fn get(&self, word: &str) -> Option<&[f64]> {
        match self.vectors.get(word) {
            Some(v) => Some(v),
            None => self.vectors.get(&word.to_lowercase()).map(Vec::as_slice),
        }
    }

    /// Unweighted mean of the known words' vectors, `None` when none are known.
    pub fn mean_vector<'a, I>(&self, words: I) -> Option<Vec<f64>>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut sum = vec![0.0; self.dimension];
        let mut n = 0usize;
        for w in words {
            if let Some(v) = self.get(w) {
                for (s, x) in sum.iter_mut().zip(v) {
                    *s += x;
                }
                n += 1;
            }
        }
        if n == 0 {
            return None;
        }
        sum.iter_mut().for_each(|s| *s /= n as f64);
        Some(sum)
    }

    /// Copy with every vector multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            dimension: self.dimension,
            vectors: self
                .vectors
                .iter()
                .map(|(w, v)| (w.clone(), v.iter().map(|x| x * factor).collect()))
                .collect(),
        }
    }
}

/// Cosine similarity; 0 when either vector has zero norm.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        (dot / (na * nb)).clamp(-1.0, 1.0)
    }
}
