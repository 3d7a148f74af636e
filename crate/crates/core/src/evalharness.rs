//! Segment-level Kendall's τ against human pairwise preferences, averaged
//! over language pairs, and the oracle sweep over vector thresholds.
//!
//! Human ties are dropped when judgments are expanded into pairs. A metric
//! tie on a human-ordered pair counts as discordant.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matchgen::{MatchSet, Stage};
use crate::metric::Meteor;
use crate::text::TokenSequence;

/// Label recorded in reports for the tie convention in use.
pub const TIE_CONVENTION: &str = "metric-ties-discordant";

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct PairwiseJudgment {
    pub language_pair: String,
    pub segment_id: u64,
    pub better_system: String,
    pub worse_system: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TauResult {
    pub concordant: usize,
    pub discordant: usize,
    pub tau: f64,
}

/// Metric scores keyed by (system, segment id).
pub type ScoreMap = HashMap<(String, u64), f64>;

pub fn load_judgments(path: impl AsRef<Path>) -> Result<Vec<PairwiseJudgment>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_judgments(&text, path)
}

/// Parse `lang_pair seg_id sysA rankA sysB rankB ...` rows (tab separated,
/// rank 1 = best) into strict pairwise preferences.
pub fn parse_judgments(text: &str, origin: &Path) -> Result<Vec<PairwiseJudgment>> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let row = idx + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        if fields.len() < 6 || !fields.len().is_multiple_of(2) {
            return Err(Error::parse(
                origin,
                row,
                format!(
                    "expected lang_pair, segment_id and at least two system/rank columns, found {} fields",
                    fields.len()
                ),
            ));
        }
        let language_pair = fields[0];
        if language_pair.is_empty() {
            return Err(Error::parse(origin, row, "empty language pair"));
        }
        let segment_id: u64 = fields[1]
            .parse()
            .map_err(|_| Error::parse(origin, row, format!("segment id {:?} is not an integer", fields[1])))?;
        let mut ranked: Vec<(&str, u32)> = Vec::with_capacity((fields.len() - 2) / 2);
        for pair in fields[2..].chunks(2) {
            let (system, rank) = (pair[0], pair[1]);
            if system.is_empty() || system.contains(char::is_whitespace) {
                return Err(Error::parse(origin, row, format!("bad system id {system:?}")));
            }
            let rank: u32 = rank
                .parse()
                .ok()
                .filter(|r| *r >= 1)
                .ok_or_else(|| Error::parse(origin, row, format!("rank {rank:?} of {system} is not a positive integer")))?;
            if ranked.iter().any(|(s, _)| *s == system) {
                return Err(Error::parse(origin, row, format!("system {system} ranked twice")));
            }
            ranked.push((system, rank));
        }
        for (i, &(sys_a, rank_a)) in ranked.iter().enumerate() {
            for &(sys_b, rank_b) in &ranked[i + 1..] {
                let (better, worse) = match rank_a.cmp(&rank_b) {
                    std::cmp::Ordering::Less => (sys_a, sys_b),
                    std::cmp::Ordering::Greater => (sys_b, sys_a),
                    std::cmp::Ordering::Equal => continue,
                };
                out.push(PairwiseJudgment {
                    language_pair: language_pair.to_string(),
                    segment_id,
                    better_system: better.to_string(),
                    worse_system: worse.to_string(),
                });
            }
        }
    }
    Ok(out)
}

pub fn kendall_tau(judgments: &[PairwiseJudgment], scores: &ScoreMap) -> Result<TauResult> {
    let mut concordant = 0;
    let mut discordant = 0;
    let mut missing: Vec<String> = Vec::new();
    for j in judgments {
        let better = scores.get(&(j.better_system.clone(), j.segment_id));
        let worse = scores.get(&(j.worse_system.clone(), j.segment_id));
        match (better, worse) {
            (Some(b), Some(w)) => {
                if b > w {
                    concordant += 1;
                } else {
                    discordant += 1;
                }
            }
            _ => {
                for (sys, s) in [(&j.better_system, better), (&j.worse_system, worse)] {
                    if s.is_none() {
                        let key = format!("{}:{}", sys, j.segment_id);
                        if !missing.contains(&key) {
                            missing.push(key);
                        }
                    }
                }
            }
        }
    }
    if !missing.is_empty() {
        let shown: Vec<&str> = missing.iter().take(10).map(String::as_str).collect();
        let more = missing.len().saturating_sub(shown.len());
        let suffix = if more > 0 { format!(" and {more} more") } else { String::new() };
        return Err(Error::MissingScore(format!("{}{suffix}", shown.join(", "))));
    }
    let total = concordant + discordant;
    if total == 0 {
        return Err(Error::Evaluation("no usable judgment pairs".into()));
    }
    Ok(TauResult {
        concordant,
        discordant,
        tau: (concordant as f64 - discordant as f64) / total as f64,
    })
}

/// τ per language pair. `scores_for` supplies the score map of a pair.
pub fn tau_by_language_pair<'a, F>(judgments: &[PairwiseJudgment], scores_for: F) -> Result<BTreeMap<String, TauResult>>
where
    F: Fn(&str) -> Option<&'a ScoreMap>,
{
    let mut grouped: BTreeMap<&str, Vec<PairwiseJudgment>> = BTreeMap::new();
    for j in judgments {
        grouped.entry(j.language_pair.as_str()).or_default().push(j.clone());
    }
    grouped
        .into_iter()
        .map(|(lp, js)| {
            let scores = scores_for(lp)
                .ok_or_else(|| Error::MissingScore(format!("no scores supplied for language pair {lp}")))?;
            let tau = kendall_tau(&js, scores).map_err(|e| match e {
                Error::MissingScore(m) => Error::MissingScore(format!("{lp}: {m}")),
                Error::Evaluation(m) => Error::Evaluation(format!("{lp}: {m}")),
                other => other,
            })?;
            Ok((lp.to_string(), tau))
        })
        .collect()
}

/// Unweighted mean of the per-pair τ values.
pub fn average_tau(results: &BTreeMap<String, TauResult>) -> Result<f64> {
    if results.is_empty() {
        return Err(Error::Evaluation("average of an empty set of τ results".into()));
    }
    Ok(results.values().map(|r| r.tau).sum::<f64>() / results.len() as f64)
}

/// Read a per-segment score TSV (`system seg_id score ...`); `#` lines are
/// comments.
pub fn load_scores(path: impl AsRef<Path>) -> Result<ScoreMap> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_scores(&text, path)
}

pub fn parse_scores(text: &str, origin: &Path) -> Result<ScoreMap> {
    let mut map = ScoreMap::new();
    for (idx, line) in text.lines().enumerate() {
        let row = idx + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < 3 {
            return Err(Error::parse(origin, row, "expected system<TAB>segment_id<TAB>score"));
        }
        let seg: u64 = fields[1]
            .trim()
            .parse()
            .map_err(|_| Error::parse(origin, row, format!("segment id {:?} is not an integer", fields[1])))?;
        let score: f64 = fields[2]
            .trim()
            .parse()
            .map_err(|_| Error::parse(origin, row, format!("score {:?} is not a number", fields[2])))?;
        if map.insert((fields[0].trim().to_string(), seg), score).is_some() {
            return Err(Error::parse(origin, row, format!("duplicate score for {}:{seg}", fields[0])));
        }
    }
    Ok(map)
}

/// Hypotheses and references for one language pair. Segment `i` (0-based
/// index) has id `i + 1`.
#[derive(Debug, Clone, Default)]
pub struct LanguagePairData {
    pub references: Vec<String>,
    pub systems: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, Default)]
pub struct Dataset {
    pub pairs: BTreeMap<String, LanguagePairData>,
    pub judgments: Vec<PairwiseJudgment>,
}

/// Manifest entry name reserved for the reference file.
pub const REFERENCE_ENTRY: &str = "@ref";

impl Dataset {
    /// Load from a manifest of `lang_pair<TAB>system<TAB>path` lines (system
    /// `@ref` marks the reference) and a judgments file. Relative paths are
    /// resolved against the manifest's directory.
    pub fn load(manifest: impl AsRef<Path>, judgments: impl AsRef<Path>) -> Result<Self> {
        let manifest = manifest.as_ref();
        let text = fs::read_to_string(manifest).map_err(|e| Error::io(manifest, e))?;
        let base = manifest.parent().map(Path::to_path_buf).unwrap_or_default();
        let mut dataset = Dataset::default();
        for (idx, line) in text.lines().enumerate() {
            let row = idx + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
            let [lp, name, file] = fields.as_slice() else {
                return Err(Error::parse(manifest, row, "expected lang_pair<TAB>system<TAB>path"));
            };
            let mut path = PathBuf::from(file);
            if path.is_relative() {
                path = base.join(path);
            }
            let lines = read_segments(&path)?;
            let entry = dataset.pairs.entry(lp.to_string()).or_default();
            if *name == REFERENCE_ENTRY {
                entry.references = lines;
            } else if entry.systems.insert(name.to_string(), lines).is_some() {
                return Err(Error::parse(manifest, row, format!("system {name} listed twice for {lp}")));
            }
        }
        dataset.judgments = load_judgments(judgments)?;
        dataset.check()?;
        Ok(dataset)
    }

    pub fn check(&self) -> Result<()> {
        for (lp, data) in &self.pairs {
            if data.references.is_empty() {
                return Err(Error::Evaluation(format!("{lp}: no reference segments")));
            }
            for (sys, hyps) in &data.systems {
                if hyps.len() != data.references.len() {
                    return Err(Error::Evaluation(format!(
                        "{lp}: system {sys} has {} segments, reference has {}",
                        hyps.len(),
                        data.references.len()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// One segment per line; the trailing newline does not add a segment.
pub fn read_segments(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text.lines().map(str::to_string).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub threshold: f64,
    pub average_tau: f64,
    pub per_pair: BTreeMap<String, TauResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub grid: Vec<SweepPoint>,
    pub best_threshold: f64,
    pub best_tau: f64,
}

/// Thresholds `lo, lo+step, ..., hi` (inclusive), rounded to 1e-9.
pub fn threshold_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // also rejects NaN
    let bad = !(step > 0.0) || !(lo <= hi);
    if bad || !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) {
        return Err(Error::config(format!(
            "grid: {lo}:{hi}:{step} must satisfy 0 <= lo <= hi <= 1 and step > 0"
        )));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|i| ((lo + i as f64 * step) * 1e9).round() / 1e9)
        .collect())
}

pub fn default_grid() -> Vec<f64> {
    threshold_grid(0.50, 1.00, 0.01).expect("static grid")
}

/// Parse `lo:hi:step`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let nums: Option<Vec<f64>> = parts.iter().map(|p| p.trim().parse().ok()).collect();
    match nums.as_deref() {
        Some([lo, hi, step]) => threshold_grid(*lo, *hi, *step),
        Some([single]) => threshold_grid(*single, *single, 1.0),
        _ => Err(Error::config(format!("grid: {spec:?} is not lo:hi:step"))),
    }
}

struct PreparedSegment {
    language_pair: usize,
    system: String,
    segment_id: u64,
    hyp: TokenSequence,
    reference: TokenSequence,
    candidates: MatchSet,
}

/// Rescore the dataset at every threshold of `grid` and report the τ curve
/// with its argmax (ties go to the larger threshold).
pub fn oracle_threshold_sweep(dataset: &Dataset, meteor: &Meteor, grid: &[f64]) -> Result<SweepResult> {
    if !meteor.config().enabled(Stage::Vector) {
        return Err(Error::config("preset: the threshold sweep needs a preset with the vector stage"));
    }
    if grid.is_empty() {
        return Err(Error::config("grid: empty threshold grid"));
    }
    let lowest = grid.iter().copied().fold(f64::INFINITY, f64::min);
    let base = meteor.with_threshold(lowest)?;
    let pair_names: Vec<&String> = dataset.pairs.keys().collect();

    let jobs: Vec<(usize, &str, usize, &str, &str)> = dataset
        .pairs
        .values()
        .enumerate()
        .flat_map(|(lp_idx, data)| {
            data.systems.iter().flat_map(move |(sys, hyps)| {
                hyps.iter()
                    .zip(&data.references)
                    .enumerate()
                    .map(move |(i, (h, r))| (lp_idx, sys.as_str(), i, h.as_str(), r.as_str()))
            })
        })
        .collect();
    let prepared: Vec<PreparedSegment> = jobs
        .par_iter()
        .map(|&(lp, sys, i, h, r)| {
            let hyp = base.tokenize(h);
            let reference = base.tokenize(r);
            let candidates = base.candidates(&hyp, &reference)?;
            Ok(PreparedSegment {
                language_pair: lp,
                system: sys.to_string(),
                segment_id: i as u64 + 1,
                hyp,
                reference,
                candidates,
            })
        })
        .collect::<Result<_>>()?;

    let mut points = Vec::with_capacity(grid.len());
    for &threshold in grid {
        let scorer = meteor.with_threshold(threshold)?;
        let scores: Vec<f64> = prepared
            .par_iter()
            .map(|seg| {
                let set = seg.candidates.with_threshold(threshold);
                scorer.score_candidates(&set, &seg.hyp, &seg.reference).score.score
            })
            .collect();
        let mut maps: Vec<ScoreMap> = vec![ScoreMap::new(); pair_names.len()];
        for (seg, score) in prepared.iter().zip(scores) {
            maps[seg.language_pair].insert((seg.system.clone(), seg.segment_id), score);
        }
        let per_pair = tau_by_language_pair(&dataset.judgments, |lp| {
            pair_names.iter().position(|n| n.as_str() == lp).map(|i| &maps[i])
        })?;
        let average = average_tau(&per_pair)?;
        points.push(SweepPoint {
            threshold,
            average_tau: average,
            per_pair,
        });
    }

    let best = points
        .iter()
        .reduce(|best, p| {
            let better = p.average_tau > best.average_tau
                || (p.average_tau == best.average_tau && p.threshold > best.threshold);
            if better {
                p
            } else {
                best
            }
        })
        .expect("non-empty grid");
    Ok(SweepResult {
        best_threshold: best.threshold,
        best_tau: best.average_tau,
        grid: points,
    })
}
