#![allow(dead_code)]

use std::path::PathBuf;

use meteor_e::resources::SynsetId;
use meteor_e::{
    CandidateMatch, EmbeddingTable, Language, MatchSet, MetricConfig, ParaphraseTable, Resources, Stage, SynonymTable,
    TokenSequence,
};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_meteor-e"))
}

pub const VOCAB: [&str; 5] = ["ka", "lo", "mi", "nu", "pe"];

/// A small random scoring problem touching every stage.
pub struct Instance {
    pub config: MetricConfig,
    pub resources: Resources,
    pub hyp: TokenSequence,
    pub reference: TokenSequence,
}

pub fn random_sentence<R: Rng>(rng: &mut R, max_len: usize) -> String {
    let n = rng.gen_range(1..=max_len);
    (0..n).map(|_| *VOCAB.choose(rng).unwrap()).collect::<Vec<_>>().join(" ")
}

pub fn random_resources<R: Rng>(rng: &mut R) -> Resources {
    let mut synonyms = SynonymTable::new(Language::Fr);
    for w in VOCAB {
        synonyms.insert(w, [SynsetId(rng.gen_range(0..3))]);
    }
    let mut paraphrases = ParaphraseTable::new();
    for _ in 0..3 {
        let phrase = |rng: &mut R| -> Vec<String> {
            let n = rng.gen_range(1..=2);
            (0..n).map(|_| VOCAB.choose(rng).unwrap().to_string()).collect()
        };
        let a = phrase(rng);
        let b = phrase(rng);
        if a != b {
            paraphrases.insert(a, b, rng.gen_range(0.05..=1.0));
        }
    }
    let oov = rng.gen_range(0..VOCAB.len());
    let vectors: Vec<(String, Vec<f64>)> = VOCAB
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != oov)
        .map(|(_, w)| (w.to_string(), (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect()))
        .collect();
    Resources {
        synonyms: Some(synonyms),
        paraphrases: Some(paraphrases),
        embeddings: Some(EmbeddingTable::from_vectors(3, vectors).unwrap()),
    }
}

pub fn random_instance<R: Rng>(rng: &mut R, max_len: usize) -> Instance {
    let mut config = MetricConfig::with_stages(Language::Fr, Stage::ALL);
    config.threshold = Some((rng.gen_range(0.3..0.9f64) * 100.0).round() / 100.0);
    for stage in Stage::ALL {
        let w = (rng.gen_range(0.1..=1.0f64) * 100.0).round() / 100.0;
        match stage {
            Stage::Exact => config.weights.exact = w,
            Stage::Stem => config.weights.stem = w,
            Stage::Synonym => config.weights.synonym = w,
            Stage::Paraphrase => config.weights.paraphrase = w,
            Stage::Vector => config.weights.vector = w,
        }
    }
    let hyp = meteor_e::tokenize(&random_sentence(rng, max_len), Language::Fr);
    let reference = meteor_e::tokenize(&random_sentence(rng, max_len), Language::Fr);
    Instance {
        config,
        resources: random_resources(rng),
        hyp,
        reference,
    }
}

/// Objective value of an alignment: covered tokens, credit in 1e-9 units, chunks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Objective {
    pub covered: usize,
    pub credit: i64,
    pub chunks: usize,
}

impl Objective {
    fn better_than(&self, other: &Objective) -> bool {
        (self.covered, self.credit, std::cmp::Reverse(self.chunks))
            > (other.covered, other.credit, std::cmp::Reverse(other.chunks))
    }
}

pub fn chunks_of(matches: &[&CandidateMatch]) -> usize {
    let mut sorted: Vec<&CandidateMatch> = matches.to_vec();
    sorted.sort_by_key(|m| m.hyp.start);
    let mut chunks = 0;
    for (i, m) in sorted.iter().enumerate() {
        let continues = i > 0 && {
            let p = sorted[i - 1];
            p.hyp.end == m.hyp.start && p.reference.end == m.reference.start
        };
        if !continues {
            chunks += 1;
        }
    }
    chunks
}

pub fn objective_of(matches: &[&CandidateMatch]) -> Objective {
    Objective {
        covered: matches.iter().map(|m| m.hyp.len() + m.reference.len()).sum(),
        credit: matches.iter().map(|m| (m.credit() * 1e9).round() as i64).sum(),
        chunks: chunks_of(matches),
    }
}

/// Exhaustive include/exclude enumeration of conflict-free subsets.
pub fn oracle(set: &MatchSet) -> Objective {
    fn go<'a>(
        cands: &'a [CandidateMatch],
        i: usize,
        chosen: &mut Vec<&'a CandidateMatch>,
        best: &mut Objective,
    ) {
        if i == cands.len() {
            let o = objective_of(chosen);
            if o.better_than(best) {
                *best = o;
            }
            return;
        }
        go(cands, i + 1, chosen, best);
        let c = &cands[i];
        if chosen.iter().all(|m| !m.conflicts(c)) {
            chosen.push(c);
            go(cands, i + 1, chosen, best);
            chosen.pop();
        }
    }
    let mut best = Objective {
        covered: 0,
        credit: 0,
        chunks: 0,
    };
    go(&set.candidates, 0, &mut Vec::new(), &mut best);
    best
}

/// Words whose vectors are built pairwise: `pair k` lives in dimensions
/// `2k, 2k+1`, so cross-pair cosines are zero.
pub fn paired_vectors(pairs: &[(String, String, f64)]) -> EmbeddingTable {
    EmbeddingTable::from_vectors(2 * pairs.len().max(1), paired_rows(pairs)).unwrap()
}

pub fn embedding_text(table_rows: &[(String, Vec<f64>)]) -> String {
    let dim = table_rows.first().map_or(1, |r| r.1.len());
    let mut out = format!("{} {dim}\n", table_rows.len());
    for (w, v) in table_rows {
        out.push_str(w);
        for x in v {
            out.push(' ');
            out.push_str(&format!("{x:?}"));
        }
        out.push('\n');
    }
    out
}

pub fn paired_rows(pairs: &[(String, String, f64)]) -> Vec<(String, Vec<f64>)> {
    let dim = 2 * pairs.len().max(1);
    let mut rows = Vec::new();
    for (k, (a, b, cos)) in pairs.iter().enumerate() {
        let mut va = vec![0.0; dim];
        va[2 * k] = 1.0;
        let mut vb = vec![0.0; dim];
        vb[2 * k] = *cos;
        vb[2 * k + 1] = (1.0 - cos * cos).sqrt();
        rows.push((a.clone(), va));
        rows.push((b.clone(), vb));
    }
    rows
}
