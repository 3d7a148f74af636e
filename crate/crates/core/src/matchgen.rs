//! Candidate match generation across the enabled stages.
//!
//! Every (hypothesis, reference) token pair is tested against the word-level
//! stages in priority order and the first stage that fires labels the pair.
//! Paraphrase candidates come from phrase-table lookups over n-grams. When a
//! phrase candidate has the same spans as a word-level one, the higher
//! priority stage wins.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::config::MetricConfig;
use crate::embeddings::EmbeddingTable;
use crate::error::{Error, Result};
use crate::resources::{ParaphraseTable, Resources, SynsetSet, SynonymTable, MAX_PHRASE_LEN};
use crate::text::{is_punctuation, Token, TokenSequence};

/// Matching stage. Declaration order is priority order, highest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Exact,
    Stem,
    Synonym,
    Paraphrase,
    Vector,
}

impl Stage {
    pub const ALL: [Stage; 5] = [
        Stage::Exact,
        Stage::Stem,
        Stage::Synonym,
        Stage::Paraphrase,
        Stage::Vector,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Exact => "exact",
            Stage::Stem => "stem",
            Stage::Synonym => "synonym",
            Stage::Paraphrase => "paraphrase",
            Stage::Vector => "vector",
        }
    }

    /// True when `self` has strictly higher priority than `other`.
    pub fn outranks(self, other: Stage) -> bool {
        self < other
    }

    pub fn is_word_level(self) -> bool {
        self != Stage::Paraphrase
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Half-open token range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start < end);
        Span { start, end }
    }

    pub fn single(pos: usize) -> Self {
        Span::new(pos, pos + 1)
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start < other.end && other.start < self.end
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateMatch {
    pub hyp: Span,
    #[serde(rename = "ref")]
    pub reference: Span,
    pub stage: Stage,
    pub weight: f64,
    /// Cosine similarity, Vector stage only.
    pub similarity: Option<f64>,
}

impl CandidateMatch {
    /// Weighted token credit: weight times the mean of the two span lengths.
    pub fn credit(&self) -> f64 {
        self.weight * (self.hyp.len() + self.reference.len()) as f64 / 2.0
    }

    pub fn conflicts(&self, other: &CandidateMatch) -> bool {
        self.hyp.overlaps(&other.hyp) || self.reference.overlaps(&other.reference)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchSet {
    pub candidates: Vec<CandidateMatch>,
    pub hyp_len: usize,
    pub ref_len: usize,
}

impl MatchSet {
    pub fn empty(hyp_len: usize, ref_len: usize) -> Self {
        MatchSet {
            candidates: Vec::new(),
            hyp_len,
            ref_len,
        }
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    /// Drop Vector candidates below `threshold`. Applied to a set generated
    /// at a lower threshold, this gives the set generation would produce at
    /// `threshold`: Vector is the lowest priority stage, so removing its
    /// candidates never uncovers another stage's pair.
    pub fn with_threshold(&self, threshold: f64) -> MatchSet {
        MatchSet {
            candidates: self
                .candidates
                .iter()
                .filter(|c| c.stage != Stage::Vector || c.similarity.is_some_and(|s| s >= threshold))
                .cloned()
                .collect(),
            hyp_len: self.hyp_len,
            ref_len: self.ref_len,
        }
    }

    fn sort(&mut self) {
        self.candidates.sort_by(|a, b| {
            (a.hyp.start, a.reference.start, a.hyp.end, a.reference.end).cmp(&(
                b.hyp.start,
                b.reference.start,
                b.hyp.end,
                b.reference.end,
            ))
        });
    }
}

fn require_synonyms(resources: &Resources) -> Result<&SynonymTable> {
    resources
        .synonyms
        .as_ref()
        .ok_or_else(|| Error::config("paths.synonyms: synonym stage enabled without a synonym table"))
}

fn require_embeddings(resources: &Resources) -> Result<&EmbeddingTable> {
    resources
        .embeddings
        .as_ref()
        .ok_or_else(|| Error::config("paths.embeddings: vector stage enabled without embeddings"))
}

fn require_paraphrases(resources: &Resources) -> Result<&ParaphraseTable> {
    resources
        .paraphrases
        .as_ref()
        .ok_or_else(|| Error::config("paths.paraphrases: paraphrase stage enabled without a phrase table"))
}

/// Test one token pair against one word-level stage.
pub fn match_pair(
    h: &Token,
    r: &Token,
    stage: Stage,
    resources: &Resources,
    config: &MetricConfig,
) -> Result<Option<CandidateMatch>> {
    let mut similarity = None;
    let hit = match stage {
        Stage::Exact => h.surface == r.surface,
        Stage::Stem => h.stem == r.stem,
        Stage::Synonym => {
            let table = require_synonyms(resources)?;
            match (
                table.lookup_with_stem(&h.surface, &h.stem),
                table.lookup_with_stem(&r.surface, &r.stem),
            ) {
                (Some(a), Some(b)) => a.intersects(b),
                _ => false,
            }
        }
        Stage::Vector => {
            let table = require_embeddings(resources)?;
            if is_punctuation(&h.surface) || is_punctuation(&r.surface) {
                false
            } else {
                match table.cosine(&h.surface, &r.surface) {
                    Some(sim) if sim >= config.threshold_or_default() => {
                        similarity = Some(sim);
                        true
                    }
                    _ => false,
                }
            }
        }
        Stage::Paraphrase => {
            return Err(Error::Internal("match_pair called with the paraphrase stage".into()))
        }
    };
    Ok(hit.then(|| CandidateMatch {
        hyp: Span::single(h.position),
        reference: Span::single(r.position),
        stage,
        weight: config.weights.get(stage),
        similarity,
    }))
}

/// All phrase-table matches between hypothesis and reference n-grams.
pub fn paraphrase_candidates(
    hyp: &TokenSequence,
    reference: &TokenSequence,
    table: &ParaphraseTable,
    weight: f64,
) -> Vec<CandidateMatch> {
    if table.is_empty() || hyp.is_empty() || reference.is_empty() {
        return Vec::new();
    }
    let hyp_words: Vec<String> = hyp.surfaces().map(str::to_string).collect();
    let ref_words: Vec<String> = reference.surfaces().map(str::to_string).collect();

    let mut ref_ngrams: HashMap<&[String], Vec<usize>> = HashMap::new();
    for start in 0..ref_words.len() {
        for n in 1..=MAX_PHRASE_LEN.min(ref_words.len() - start) {
            ref_ngrams.entry(&ref_words[start..start + n]).or_default().push(start);
        }
    }

    let mut out: HashMap<(Span, Span), f64> = HashMap::new();
    for start in 0..hyp_words.len() {
        for n in 1..=MAX_PHRASE_LEN.min(hyp_words.len() - start) {
            let phrase = &hyp_words[start..start + n];
            for (partner, table_weight) in table.partners(phrase) {
                let Some(ref_starts) = ref_ngrams.get(partner.as_slice()) else {
                    continue;
                };
                for &rs in ref_starts {
                    let key = (Span::new(start, start + n), Span::new(rs, rs + partner.len()));
                    let w = weight * table_weight;
                    let slot = out.entry(key).or_insert(w);
                    if w > *slot {
                        *slot = w;
                    }
                }
            }
        }
    }
    let mut cands: Vec<CandidateMatch> = out
        .into_iter()
        .map(|((h, r), w)| CandidateMatch {
            hyp: h,
            reference: r,
            stage: Stage::Paraphrase,
            weight: w,
            similarity: None,
        })
        .collect();
    cands.sort_by_key(|c| (c.hyp, c.reference));
    cands
}

/// Per-token lookups done once per segment rather than once per pair.
struct TokenFeatures<'a> {
    synsets: Vec<Option<&'a SynsetSet>>,
    vector_ids: Vec<Option<usize>>,
}

impl<'a> TokenFeatures<'a> {
    fn new(seq: &TokenSequence, synonyms: Option<&'a SynonymTable>, embeddings: Option<&EmbeddingTable>) -> Self {
        let synsets = seq
            .tokens
            .iter()
            .map(|t| synonyms.and_then(|s| s.lookup_with_stem(&t.surface, &t.stem)))
            .collect();
        let vector_ids = seq
            .tokens
            .iter()
            .map(|t| {
                if is_punctuation(&t.surface) {
                    None
                } else {
                    embeddings.and_then(|e| e.id(&t.surface))
                }
            })
            .collect();
        TokenFeatures { synsets, vector_ids }
    }
}

/// Union of candidates over enabled stages, one candidate per span pair.
pub fn generate_candidates(
    hyp: &TokenSequence,
    reference: &TokenSequence,
    config: &MetricConfig,
    resources: &Resources,
) -> Result<MatchSet> {
    let synonyms = if config.enabled(Stage::Synonym) {
        Some(require_synonyms(resources)?)
    } else {
        None
    };
    let embeddings = if config.enabled(Stage::Vector) {
        Some(require_embeddings(resources)?)
    } else {
        None
    };
    let paraphrases = if config.enabled(Stage::Paraphrase) {
        Some(require_paraphrases(resources)?)
    } else {
        None
    };
    let threshold = config.threshold_or_default();
    let word_stages: Vec<Stage> = config.stages.iter().copied().filter(|s| s.is_word_level()).collect();

    let hf = TokenFeatures::new(hyp, synonyms, embeddings);
    let rf = TokenFeatures::new(reference, synonyms, embeddings);

    let mut set = MatchSet::empty(hyp.len(), reference.len());
    let mut word_level: HashMap<(usize, usize), usize> = HashMap::new();
    for (i, h) in hyp.tokens.iter().enumerate() {
        for (j, r) in reference.tokens.iter().enumerate() {
            let mut similarity = None;
            let fired = word_stages.iter().copied().find(|&stage| match stage {
                Stage::Exact => h.surface == r.surface,
                Stage::Stem => h.stem == r.stem,
                Stage::Synonym => match (hf.synsets[i], rf.synsets[j]) {
                    (Some(a), Some(b)) => a.intersects(b),
                    _ => false,
                },
                Stage::Vector => match (hf.vector_ids[i], rf.vector_ids[j], embeddings) {
                    (Some(a), Some(b), Some(e)) => {
                        let sim = e.cosine_ids(a, b);
                        similarity = Some(sim);
                        sim >= threshold
                    }
                    _ => false,
                },
                Stage::Paraphrase => false,
            });
            if let Some(stage) = fired {
                word_level.insert((i, j), set.candidates.len());
                set.candidates.push(CandidateMatch {
                    hyp: Span::single(i),
                    reference: Span::single(j),
                    stage,
                    weight: config.weights.get(stage),
                    similarity: if stage == Stage::Vector { similarity } else { None },
                });
            }
        }
    }

    if let Some(table) = paraphrases {
        for cand in paraphrase_candidates(hyp, reference, table, config.weights.paraphrase) {
            let key = (cand.hyp.start, cand.reference.start);
            if cand.hyp.len() == 1 && cand.reference.len() == 1 {
                if let Some(&idx) = word_level.get(&key) {
                    if cand.stage.outranks(set.candidates[idx].stage) {
                        set.candidates[idx] = cand;
                    }
                    continue;
                }
            }
            set.candidates.push(cand);
        }
    }
    set.sort();
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Preset;
    use crate::text::{tokenize, Language};

    fn seq(text: &str) -> TokenSequence {
        tokenize(text, Language::Fr)
    }

    fn unit_pair(cos: f64) -> (Vec<f64>, Vec<f64>) {
        (vec![1.0, 0.0], vec![cos, (1.0 - cos * cos).sqrt()])
    }

    fn vector_resources(pairs: &[(&str, &str, f64)]) -> Resources {
        let dim = 2 * pairs.len();
        let mut vecs = Vec::new();
        for (k, (a, b, cos)) in pairs.iter().enumerate() {
            let (va, vb) = unit_pair(*cos);
            let mut x = vec![0.0; dim];
            let mut y = vec![0.0; dim];
            x[2 * k..2 * k + 2].copy_from_slice(&va);
            y[2 * k..2 * k + 2].copy_from_slice(&vb);
            vecs.push((a.to_string(), x));
            vecs.push((b.to_string(), y));
        }
        Resources {
            embeddings: Some(EmbeddingTable::from_vectors(dim, vecs).unwrap()),
            ..Resources::default()
        }
    }

    #[test]
    fn exact_pair() {
        let config = MetricConfig::with_stages(Language::Fr, [Stage::Exact]);
        let s = seq("chat");
        let m = match_pair(&s.tokens[0], &s.tokens[0], Stage::Exact, &Resources::default(), &config)
            .unwrap()
            .unwrap();
        assert_eq!(m.weight, 1.0);
        assert_eq!(m.stage, Stage::Exact);
    }

    #[test]
    fn vector_threshold_gate() {
        let res = vector_resources(&[("pense", "estime", 0.86), ("bénéfice", "intérêt", 0.76)]);
        let mut config = MetricConfig::from_preset(Preset::Vector, Language::Fr);
        let (h, r) = (seq("pense bénéfice"), seq("estime intérêt"));
        let m = match_pair(&h.tokens[0], &r.tokens[0], Stage::Vector, &res, &config).unwrap().unwrap();
        assert!((m.similarity.unwrap() - 0.86).abs() < 1e-9);
        assert!(match_pair(&h.tokens[1], &r.tokens[1], Stage::Vector, &res, &config).unwrap().is_none());
        config.threshold = Some(0.75);
        assert!(match_pair(&h.tokens[1], &r.tokens[1], Stage::Vector, &res, &config).unwrap().is_some());
    }

    #[test]
    fn missing_resources_are_config_errors() {
        let config = MetricConfig::from_preset(Preset::DbnaryVector, Language::Fr);
        let s = seq("a");
        let res = Resources::default();
        assert!(matches!(
            match_pair(&s.tokens[0], &s.tokens[0], Stage::Synonym, &res, &config),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            match_pair(&s.tokens[0], &s.tokens[0], Stage::Vector, &res, &config),
            Err(Error::Config(_))
        ));
        assert!(matches!(generate_candidates(&s, &s, &config, &res), Err(Error::Config(_))));
    }

    #[test]
    fn identical_segments_exact_only() {
        let config = MetricConfig::with_stages(Language::Fr, [Stage::Exact]);
        let s = seq("le chat dort");
        let set = generate_candidates(&s, &s, &config, &Resources::default()).unwrap();
        assert_eq!(set.len(), 3);
        for (i, c) in set.candidates.iter().enumerate() {
            assert_eq!((c.hyp.start, c.reference.start), (i, i));
        }
    }

    #[test]
    fn priority_dedup_prefers_exact() {
        let res = vector_resources(&[("le", "la", 0.5)]);
        let config = MetricConfig::from_preset(Preset::Vector, Language::Fr);
        let s = seq("le");
        let set = generate_candidates(&s, &s, &config, &res).unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(set.candidates[0].stage, Stage::Exact);
    }

    #[test]
    fn vector_skips_punctuation() {
        let mut res = vector_resources(&[(".", ",", 0.99)]);
        let config = MetricConfig::from_preset(Preset::Vector, Language::Fr);
        let set = generate_candidates(&seq("."), &seq(","), &config, &res).unwrap();
        assert!(set.is_empty());
        res.embeddings = None;
        assert!(generate_candidates(&seq("."), &seq(","), &config, &res).is_err());
    }

    #[test]
    fn paraphrase_lookup() {
        let table = ParaphraseTable::from_pairs([("point of order", "question of procedure", 0.7)]);
        let hyp = tokenize("a point of order", Language::En);
        let reference = tokenize("question of procedure here", Language::En);
        let c = paraphrase_candidates(&hyp, &reference, &table, 0.6);
        assert_eq!(c.len(), 1);
        assert_eq!((c[0].hyp, c[0].reference), (Span::new(1, 4), Span::new(0, 3)));
        assert!((c[0].weight - 0.42).abs() < 1e-12);
        // reversed direction
        let c = paraphrase_candidates(&reference, &hyp, &table, 0.6);
        assert_eq!(c.len(), 1);
        assert!(paraphrase_candidates(&hyp, &reference, &ParaphraseTable::new(), 0.6).is_empty());
    }

    #[test]
    fn overlapping_paraphrases_both_emitted() {
        let table = ParaphraseTable::from_pairs([("a b", "x", 0.5), ("b c", "y", 0.5)]);
        let hyp = tokenize("a b c", Language::En);
        let reference = tokenize("x y", Language::En);
        let c = paraphrase_candidates(&hyp, &reference, &table, 1.0);
        assert_eq!(c.len(), 2);
        assert!(c[0].conflicts(&c[1]));
    }

    #[test]
    fn one_to_one_paraphrase_yields_to_exact_but_beats_vector() {
        let table = ParaphraseTable::from_pairs([("a", "a", 1.0), ("b", "c", 1.0)]);
        let mut res = vector_resources(&[("b", "c", 0.95)]);
        res.paraphrases = Some(table);
        let config = MetricConfig::with_stages(Language::En, [Stage::Exact, Stage::Paraphrase, Stage::Vector]);
        let set = generate_candidates(&tokenize("a b", Language::En), &tokenize("a c", Language::En), &config, &res)
            .unwrap();
        let stages: Vec<Stage> = set.candidates.iter().map(|c| c.stage).collect();
        assert_eq!(stages, [Stage::Exact, Stage::Paraphrase]);
    }
}
