//! Lexical resources: the synonym table (lemma to synset ids) and the
//! paraphrase phrase table.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::config::MetricConfig;
use crate::embeddings::EmbeddingTable;
use crate::error::{Error, Result};
use crate::matchgen::Stage;
use crate::text::{normalize, stem, Language};

/// Opaque synset identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SynsetId(pub u64);

/// Sorted, deduplicated set of synset ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SynsetSet(Vec<SynsetId>);

impl SynsetSet {
    fn from_unsorted(mut ids: Vec<SynsetId>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        SynsetSet(ids)
    }

    fn merge(&mut self, other: &SynsetSet) {
        let mut ids = std::mem::take(&mut self.0);
        ids.extend_from_slice(&other.0);
        *self = SynsetSet::from_unsorted(ids);
    }

    pub fn ids(&self) -> &[SynsetId] {
        &self.0
    }

    pub fn intersects(&self, other: &SynsetSet) -> bool {
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.0, &other.0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }
}

/// Map from lemma to synset ids. Two words are synonyms when their synset
/// sets intersect.
///
/// Words are looked up by surface form first, then through the optional
/// lemma sidecar, then by stem. The stem key matches any lemma sharing that
/// stem, which stands in for a real lemmatizer.
#[derive(Debug, Clone)]
pub struct SynonymTable {
    language: Language,
    entries: BTreeMap<String, SynsetSet>,
    by_stem: HashMap<String, SynsetSet>,
    lemmas: HashMap<String, String>,
}

impl PartialEq for SynonymTable {
    fn eq(&self, other: &Self) -> bool {
        self.language == other.language && self.entries == other.entries
    }
}

impl SynonymTable {
    pub fn new(language: Language) -> Self {
        SynonymTable {
            language,
            entries: BTreeMap::new(),
            by_stem: HashMap::new(),
            lemmas: HashMap::new(),
        }
    }

    pub fn load(path: impl AsRef<Path>, language: Language) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, language, path)
    }

    pub fn parse(text: &str, language: Language, origin: &Path) -> Result<Self> {
        let mut table = SynonymTable::new(language);
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let (lemma, ids) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(origin, line_no, "missing tab between lemma and ids"))?;
            let lemma = normalize(lemma.trim());
            if lemma.is_empty() {
                return Err(Error::parse(origin, line_no, "empty lemma"));
            }
            let ids = ids
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<u64>().map(SynsetId).map_err(|_| {
                        Error::parse(origin, line_no, format!("synset id {tok:?} is not a non-negative integer"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            if ids.is_empty() {
                return Err(Error::parse(origin, line_no, format!("lemma {lemma:?} has no synset ids")));
            }
            table.insert(lemma, ids);
        }
        if table.is_empty() {
            log::warn!("synonym table {} is empty", origin.display());
        }
        Ok(table)
    }

    /// Add (or merge) an entry.
    pub fn insert(&mut self, lemma: impl AsRef<str>, ids: impl IntoIterator<Item = SynsetId>) {
        let lemma = normalize(lemma.as_ref());
        let set = SynsetSet::from_unsorted(ids.into_iter().collect());
        if set.0.is_empty() {
            return;
        }
        self.by_stem
            .entry(stem(&lemma, self.language))
            .or_default()
            .merge(&set);
        self.entries.entry(lemma).or_default().merge(&set);
    }

    /// Install a token-to-lemma sidecar map consulted before the stem fallback.
    pub fn with_lemmas(mut self, lemmas: HashMap<String, String>) -> Self {
        self.lemmas = lemmas
            .into_iter()
            .map(|(k, v)| (normalize(&k), normalize(&v)))
            .collect();
        self
    }

    /// Load a `token<TAB>lemma` sidecar file.
    pub fn load_lemmas(path: impl AsRef<Path>) -> Result<HashMap<String, String>> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut map = HashMap::new();
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (tok, lemma) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(path, idx + 1, "expected token<TAB>lemma"))?;
            map.insert(tok.trim().to_string(), lemma.trim().to_string());
        }
        Ok(map)
    }

    pub fn language(&self) -> Language {
        self.language
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, lemma: &str) -> Option<&SynsetSet> {
        self.entries.get(lemma)
    }

    /// Synsets for a normalized word whose stem is already known.
    pub fn lookup_with_stem(&self, word: &str, word_stem: &str) -> Option<&SynsetSet> {
        if let Some(set) = self.entries.get(word) {
            return Some(set);
        }
        if let Some(set) = self.lemmas.get(word).and_then(|l| self.entries.get(l)) {
            return Some(set);
        }
        self.by_stem.get(word_stem)
    }

    pub fn lookup(&self, word: &str) -> Option<&SynsetSet> {
        let word = normalize(word);
        let word_stem = stem(&word, self.language);
        self.lookup_with_stem(&word, &word_stem)
    }

    pub fn synonyms(&self, a: &str, b: &str) -> bool {
        match (self.lookup(a), self.lookup(b)) {
            (Some(x), Some(y)) => x.intersects(y),
            _ => false,
        }
    }

    /// Render in the load format, lemmas sorted.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for (lemma, set) in &self.entries {
            let ids: Vec<String> = set.0.iter().map(|id| id.0.to_string()).collect();
            let _ = writeln!(out, "{lemma}\t{}", ids.join(" "));
        }
        out
    }
}

/// Longest phrase (in tokens) kept from a paraphrase table.
pub const MAX_PHRASE_LEN: usize = 6;

pub type Phrase = Vec<String>;

/// Symmetric phrase-pair table. Each unordered pair is stored once.
#[derive(Debug, Clone, Default)]
pub struct ParaphraseTable {
    pairs: BTreeMap<(Phrase, Phrase), f64>,
    index: HashMap<Phrase, Vec<(Phrase, f64)>>,
}

impl PartialEq for ParaphraseTable {
    fn eq(&self, other: &Self) -> bool {
        self.pairs == other.pairs
    }
}

fn canonical(a: Phrase, b: Phrase) -> (Phrase, Phrase) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn split_phrase(text: &str) -> Phrase {
    normalize(text).split_whitespace().map(str::to_string).collect()
}

impl ParaphraseTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut table = ParaphraseTable::new();
        let mut skipped = 0usize;
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(Error::parse(
                    origin,
                    line_no,
                    format!("expected phrase<TAB>phrase<TAB>weight, found {} fields", fields.len()),
                ));
            }
            let weight: f64 = fields[2]
                .trim()
                .parse()
                .map_err(|_| Error::parse(origin, line_no, format!("weight {:?} is not a number", fields[2])))?;
            if !(weight > 0.0 && weight <= 1.0) {
                return Err(Error::parse(origin, line_no, format!("weight {weight} outside (0, 1]")));
            }
            let (a, b) = (split_phrase(fields[0]), split_phrase(fields[1]));
            if a.is_empty() || b.is_empty() {
                return Err(Error::parse(origin, line_no, "empty phrase"));
            }
            if a.len() > MAX_PHRASE_LEN || b.len() > MAX_PHRASE_LEN {
                skipped += 1;
                continue;
            }
            table.insert_pair(a, b, weight);
        }
        if skipped > 0 {
            log::warn!(
                "{}: skipped {skipped} pairs longer than {MAX_PHRASE_LEN} tokens",
                origin.display()
            );
        }
        table.rebuild_index();
        Ok(table)
    }

    /// Insert a pair; a duplicate keeps the larger weight.
    pub fn insert(&mut self, a: Phrase, b: Phrase, weight: f64) {
        let w = self.insert_pair(a.clone(), b.clone(), weight);
        for (from, to) in [(&a, &b), (&b, &a)] {
            let partners = self.index.entry(from.clone()).or_default();
            match partners.binary_search_by(|(p, _)| p.cmp(to)) {
                Ok(i) => partners[i].1 = w,
                Err(i) => partners.insert(i, (to.clone(), w)),
            }
            if a == b {
                break;
            }
        }
    }

    /// Update `pairs` only; returns the stored weight.
    fn insert_pair(&mut self, a: Phrase, b: Phrase, weight: f64) -> f64 {
        let slot = self.pairs.entry(canonical(a, b)).or_insert(weight);
        if weight > *slot {
            *slot = weight;
        }
        *slot
    }

    fn rebuild_index(&mut self) {
        self.index.clear();
        for ((a, b), &w) in &self.pairs {
            self.index.entry(a.clone()).or_default().push((b.clone(), w));
            if a != b {
                self.index.entry(b.clone()).or_default().push((a.clone(), w));
            }
        }
        for partners in self.index.values_mut() {
            partners.sort_by(|x, y| x.0.cmp(&y.0));
        }
    }

    /// Build from pairs directly.
    pub fn from_pairs<I, P>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (P, P, f64)>,
        P: AsRef<str>,
    {
        let mut table = ParaphraseTable::new();
        for (a, b, w) in pairs {
            table.insert_pair(split_phrase(a.as_ref()), split_phrase(b.as_ref()), w);
        }
        table.rebuild_index();
        table
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn weight(&self, a: &[String], b: &[String]) -> Option<f64> {
        let key = canonical(a.to_vec(), b.to_vec());
        self.pairs.get(&key).copied()
    }

    /// Every phrase paired with `phrase`, with its weight.
    /// Partners of `phrase`, sorted by phrase.
    pub fn partners(&self, phrase: &[String]) -> &[(Phrase, f64)] {
        self.index.get(phrase).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for ((a, b), w) in &self.pairs {
            let _ = writeln!(out, "{}\t{}\t{}", a.join(" "), b.join(" "), w);
        }
        out
    }
}

/// Loaded resources for the enabled stages.
#[derive(Debug, Clone, Default)]
pub struct Resources {
    pub synonyms: Option<SynonymTable>,
    pub paraphrases: Option<ParaphraseTable>,
    pub embeddings: Option<EmbeddingTable>,
}

impl Resources {
    /// Load every resource an enabled stage needs from the configured paths.
    pub fn load(config: &MetricConfig) -> Result<Self> {
        config.validate_paths()?;
        let mut res = Resources::default();
        if config.enabled(Stage::Synonym) {
            if let Some(p) = &config.paths.synonyms {
                res.synonyms = Some(SynonymTable::load(p, config.language)?);
            }
        }
        if config.enabled(Stage::Paraphrase) {
            if let Some(p) = &config.paths.paraphrases {
                res.paraphrases = Some(ParaphraseTable::load(p)?);
            }
        }
        if config.enabled(Stage::Vector) {
            if let Some(p) = &config.paths.embeddings {
                res.embeddings = Some(EmbeddingTable::load(p)?);
            }
        }
        Ok(res)
    }
}
