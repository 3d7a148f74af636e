//! Word vectors in the common text format (`vocab dim` header, then
//! `word v1 .. v_dim` rows), L2-normalized at load so that cosine is a
//! plain dot product.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};
use crate::text::normalize;

#[derive(Debug, Clone)]
pub struct EmbeddingTable {
    dim: usize,
    words: Vec<String>,
    index: HashMap<String, usize>,
    /// Lowercased aliases for mixed-case entries whose lowercase form is
    /// not itself in the file.
    lower_alias: HashMap<String, usize>,
    data: Vec<f64>,
}

/// Norm below which a row counts as the zero vector.
const ZERO_NORM: f64 = 1e-12;

impl EmbeddingTable {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(BufReader::new(file), path)
    }

    pub fn from_reader<R: BufRead>(reader: R, origin: &Path) -> Result<Self> {
        let mut lines = reader.lines().enumerate();
        let (vocab, dim) = loop {
            let Some((idx, line)) = lines.next() else {
                return Err(Error::parse(origin, 1, "missing `vocab_size dim` header"));
            };
            let line = line.map_err(|e| Error::io(origin, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parsed = match fields.as_slice() {
                [v, d] => v.parse::<usize>().ok().zip(d.parse::<usize>().ok()),
                _ => None,
            };
            match parsed {
                Some((v, d)) if d > 0 => break (v, d),
                _ => {
                    return Err(Error::parse(
                        origin,
                        idx + 1,
                        format!("bad header {line:?}, expected `vocab_size dim`"),
                    ))
                }
            }
        };

        let mut table = EmbeddingTable {
            dim,
            words: Vec::with_capacity(vocab),
            index: HashMap::with_capacity(vocab),
            lower_alias: HashMap::new(),
            data: Vec::with_capacity(vocab * dim),
        };
        let mut rows = 0usize;
        let mut row = Vec::with_capacity(dim);
        for (idx, line) in lines {
            let line_no = idx + 1;
            let line = line.map_err(|e| Error::io(origin, e))?;
            if line.trim().is_empty() {
                continue;
            }
            rows += 1;
            let mut fields = line.split_whitespace();
            let word = fields.next().unwrap_or_default();
            row.clear();
            for f in fields {
                let v: f64 = f
                    .parse()
                    .map_err(|_| Error::parse(origin, line_no, format!("value {f:?} of {word:?} is not a number")))?;
                if !v.is_finite() {
                    return Err(Error::parse(origin, line_no, format!("non-finite value in vector of {word:?}")));
                }
                row.push(v);
            }
            if row.len() != dim {
                return Err(Error::parse(
                    origin,
                    line_no,
                    format!("vector of {word:?} has {} values, header says {dim}", row.len()),
                ));
            }
            let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm < ZERO_NORM {
                return Err(Error::parse(origin, line_no, format!("zero vector for {word:?}")));
            }
            let key = normalize_key(word);
            if table.index.contains_key(&key) {
                log::warn!("{}:{line_no}: duplicate word {word:?}, keeping first", origin.display());
                continue;
            }
            let id = table.words.len();
            table.index.insert(key, id);
            table.words.push(word.to_string());
            table.data.extend(row.iter().map(|v| v / norm));
        }
        if rows != vocab {
            return Err(Error::parse(
                origin,
                1,
                format!("header declares {vocab} words but {rows} rows follow"),
            ));
        }
        table.build_aliases();
        Ok(table)
    }

    /// Build a table from in-memory vectors (normalized here).
    pub fn from_vectors<I, S>(dim: usize, vectors: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Vec<f64>)>,
        S: Into<String>,
    {
        if dim == 0 {
            return Err(Error::config("embedding dimension must be positive"));
        }
        let mut table = EmbeddingTable {
            dim,
            words: Vec::new(),
            index: HashMap::new(),
            lower_alias: HashMap::new(),
            data: Vec::new(),
        };
        for (word, v) in vectors {
            let word = word.into();
            if v.len() != dim {
                return Err(Error::config(format!("vector for {word:?} has length {}", v.len())));
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm < ZERO_NORM || !norm.is_finite() {
                return Err(Error::config(format!("degenerate vector for {word:?}")));
            }
            let key = normalize_key(&word);
            if table.index.contains_key(&key) {
                continue;
            }
            table.index.insert(key, table.words.len());
            table.words.push(word);
            table.data.extend(v.iter().map(|x| x / norm));
        }
        table.build_aliases();
        Ok(table)
    }

    fn build_aliases(&mut self) {
        for (id, word) in self.words.iter().enumerate() {
            let lower = normalize(word);
            if !self.index.contains_key(&lower) {
                self.lower_alias.entry(lower).or_insert(id);
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Row id of a word: as-is, then lowercased.
    pub fn id(&self, word: &str) -> Option<usize> {
        if let Some(&id) = self.index.get(word) {
            return Some(id);
        }
        let lower = normalize(word);
        self.index
            .get(&lower)
            .or_else(|| self.lower_alias.get(&lower))
            .copied()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.id(word).is_some()
    }

    pub fn vector(&self, word: &str) -> Option<&[f64]> {
        self.id(word).map(|id| self.row(id))
    }

    fn row(&self, id: usize) -> &[f64] {
        &self.data[id * self.dim..(id + 1) * self.dim]
    }

    /// Cosine between two rows. Arguments are put in canonical order so the
    /// result is bit-identical in both directions.
    pub fn cosine_ids(&self, a: usize, b: usize) -> f64 {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let dot: f64 = self.row(lo).iter().zip(self.row(hi)).map(|(x, y)| x * y).sum();
        dot.clamp(-1.0, 1.0)
    }

    /// `None` when either word has no vector.
    pub fn cosine(&self, a: &str, b: &str) -> Option<f64> {
        Some(self.cosine_ids(self.id(a)?, self.id(b)?))
    }

    /// Top-k most similar words, excluding `word`; ties break lexicographically.
    pub fn neighbors(&self, word: &str, k: usize) -> Result<Vec<(String, f64)>> {
        let id = self.id(word).ok_or_else(|| Error::OutOfVocabulary(word.to_string()))?;
        let mut scored: Vec<(f64, usize)> = (0..self.words.len())
            .filter(|&other| other != id)
            .map(|other| (self.cosine_ids(id, other), other))
            .collect();
        scored.sort_by(|a, b| {
            b.0.total_cmp(&a.0)
                .then_with(|| self.words[a.1].cmp(&self.words[b.1]))
        });
        Ok(scored
            .into_iter()
            .take(k)
            .map(|(sim, other)| (self.words[other].clone(), sim))
            .collect())
    }
}

fn normalize_key(word: &str) -> String {
    use unicode_normalization::UnicodeNormalization;
    word.nfc().collect()
}
