//! Segment statistics and the parameterized METEOR score.
//!
//! ```text
//! P       = weighted_matches / hyp_len
//! R       = weighted_matches / ref_len
//! fmean   = P·R / (α·P + (1−α)·R)
//! penalty = γ · (chunks / matched)^β
//! score   = (1 − penalty) · fmean
//! ```
//!
//! `matched` is the mean of covered hypothesis and reference tokens, which
//! equals the match count when every match is word-to-word.

use serde::Serialize;

use crate::aligner::Alignment;
use crate::config::MetricConfig;
use crate::error::{Error, Result};
use crate::text::TokenSequence;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct SegmentStats {
    pub weighted_matches: f64,
    pub covered_hyp: usize,
    pub covered_ref: usize,
    pub hyp_len: usize,
    pub ref_len: usize,
    pub chunks: usize,
    pub matches: usize,
}

impl SegmentStats {
    fn add(&mut self, other: &SegmentStats) {
        self.weighted_matches += other.weighted_matches;
        self.covered_hyp += other.covered_hyp;
        self.covered_ref += other.covered_ref;
        self.hyp_len += other.hyp_len;
        self.ref_len += other.ref_len;
        self.chunks += other.chunks;
        self.matches += other.matches;
    }

    /// Mean covered tokens over both sides; the fragmentation denominator.
    pub fn matched_tokens(&self) -> f64 {
        (self.covered_hyp + self.covered_ref) as f64 / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScoreBreakdown {
    pub precision: f64,
    pub recall: f64,
    pub fmean: f64,
    pub penalty: f64,
    pub score: f64,
    /// Both segment sides were empty.
    pub degenerate: bool,
}

pub fn segment_stats(alignment: &Alignment, hyp: &TokenSequence, reference: &TokenSequence) -> SegmentStats {
    SegmentStats {
        weighted_matches: alignment.total_weighted,
        covered_hyp: alignment.covered_hyp,
        covered_ref: alignment.covered_ref,
        hyp_len: hyp.len(),
        ref_len: reference.len(),
        chunks: alignment.chunks,
        matches: alignment.matches.len(),
    }
}

pub fn score_from_stats(stats: &SegmentStats, config: &MetricConfig) -> ScoreBreakdown {
    if stats.hyp_len == 0 && stats.ref_len == 0 {
        return ScoreBreakdown {
            precision: 0.0,
            recall: 0.0,
            fmean: 0.0,
            penalty: 0.0,
            score: 0.0,
            degenerate: true,
        };
    }
    let ratio = |num: f64, den: usize| if den == 0 { 0.0 } else { (num / den as f64).clamp(0.0, 1.0) };
    let precision = ratio(stats.weighted_matches, stats.hyp_len);
    let recall = ratio(stats.weighted_matches, stats.ref_len);
    let fmean = if precision == 0.0 && recall == 0.0 {
        0.0
    } else {
        let alpha = config.alpha;
        (precision * recall / (alpha * precision + (1.0 - alpha) * recall)).clamp(0.0, 1.0)
    };
    let matched = stats.matched_tokens();
    let penalty = if stats.matches == 0 || matched == 0.0 {
        0.0
    } else {
        let frag = (stats.chunks as f64 / matched).min(1.0);
        (config.gamma * frag.powf(config.beta)).clamp(0.0, 1.0)
    };
    ScoreBreakdown {
        precision,
        recall,
        fmean,
        penalty,
        score: ((1.0 - penalty) * fmean).clamp(0.0, 1.0),
        degenerate: false,
    }
}

/// Score of the summed statistics. Segments are summed in the given order.
pub fn corpus_score(stats: &[SegmentStats], config: &MetricConfig) -> Result<ScoreBreakdown> {
    if stats.is_empty() {
        return Err(Error::Evaluation("corpus score of an empty segment list".into()));
    }
    Ok(score_from_stats(&corpus_stats(stats), config))
}

pub fn corpus_stats(stats: &[SegmentStats]) -> SegmentStats {
    let mut total = SegmentStats::default();
    for s in stats {
        total.add(s);
    }
    total
}
