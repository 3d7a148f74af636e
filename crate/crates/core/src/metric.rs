//! End-to-end segment scoring: tokenize, generate candidates, align, score.

use std::sync::Arc;

use serde::Serialize;

use crate::aligner::{align, Alignment};
use crate::config::MetricConfig;
use crate::error::Result;
use crate::matchgen::{generate_candidates, MatchSet, Stage};
use crate::resources::Resources;
use crate::scorer::{corpus_score, score_from_stats, segment_stats, ScoreBreakdown, SegmentStats};
use crate::text::{tokenize, TokenSequence};

#[derive(Debug, Clone, Serialize)]
pub struct SegmentResult {
    pub alignment: Alignment,
    pub stats: SegmentStats,
    pub score: ScoreBreakdown,
}

/// A validated configuration bundled with its loaded resources.
#[derive(Debug, Clone)]
pub struct Meteor {
    config: MetricConfig,
    resources: Arc<Resources>,
}

impl Meteor {
    pub fn new(config: MetricConfig, resources: Resources) -> Result<Self> {
        config.validate()?;
        // Fails early with a configuration error when a resource is missing.
        let probe = TokenSequence {
            tokens: Vec::new(),
            language: config.language,
        };
        generate_candidates(&probe, &probe, &config, &resources)?;
        Ok(Meteor {
            config,
            resources: Arc::new(resources),
        })
    }

    /// Validate the config and load its resources from disk.
    pub fn load(config: MetricConfig) -> Result<Self> {
        config.validate()?;
        let resources = Resources::load(&config)?;
        Meteor::new(config, resources)
    }

    pub fn config(&self) -> &MetricConfig {
        &self.config
    }

    pub fn resources(&self) -> &Resources {
        &self.resources
    }

    pub fn tokenize(&self, text: &str) -> TokenSequence {
        tokenize(text, self.config.language)
    }

    pub fn candidates(&self, hyp: &TokenSequence, reference: &TokenSequence) -> Result<MatchSet> {
        generate_candidates(hyp, reference, &self.config, &self.resources)
    }

    pub fn score_tokens(&self, hyp: &TokenSequence, reference: &TokenSequence) -> Result<SegmentResult> {
        let set = self.candidates(hyp, reference)?;
        Ok(self.score_candidates(&set, hyp, reference))
    }

    pub fn score_candidates(&self, set: &MatchSet, hyp: &TokenSequence, reference: &TokenSequence) -> SegmentResult {
        let alignment = align(set);
        let stats = segment_stats(&alignment, hyp, reference);
        let score = score_from_stats(&stats, &self.config);
        SegmentResult {
            alignment,
            stats,
            score,
        }
    }

    pub fn score(&self, hyp: &str, reference: &str) -> Result<SegmentResult> {
        self.score_tokens(&self.tokenize(hyp), &self.tokenize(reference))
    }

    pub fn corpus(&self, results: &[SegmentResult]) -> Result<ScoreBreakdown> {
        let stats: Vec<SegmentStats> = results.iter().map(|r| r.stats).collect();
        corpus_score(&stats, &self.config)
    }

    /// Same resources, different vector threshold.
    pub fn with_threshold(&self, threshold: f64) -> Result<Self> {
        let mut config = self.config.clone();
        if config.enabled(Stage::Vector) {
            config.threshold = Some(threshold);
        }
        config.validate()?;
        Ok(Meteor {
            config,
            resources: Arc::clone(&self.resources),
        })
    }
}
