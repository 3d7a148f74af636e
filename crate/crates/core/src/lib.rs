//! METEOR-family machine translation evaluation with an embedding-based
//! matching stage.
//!
//! The pipeline is `tokenize → generate_candidates → align → score`, wrapped
//! by [`Meteor`]. [`evalharness`] computes segment-level Kendall's τ against
//! pairwise human judgments and sweeps the vector similarity threshold.
//!
//! ```
//! use meteor_e::{Language, Meteor, MetricConfig, Preset, Resources, Stage};
//!
//! let config = MetricConfig::with_stages(Language::En, [Stage::Exact, Stage::Stem]);
//! let meteor = Meteor::new(config, Resources::default()).unwrap();
//! let result = meteor.score("the cats sat", "the cat sat").unwrap();
//! assert_eq!(result.stats.matches, 3);
//! assert_eq!(result.stats.chunks, 1);
//! # let _ = Preset::Baseline;
//! ```

pub mod aligner;
pub mod cli;
pub mod config;
pub mod embeddings;
pub mod error;
pub mod evalharness;
pub mod matchgen;
pub mod metric;
pub mod resources;
pub mod scorer;
pub mod text;

pub use aligner::{align, align_with, Alignment, SearchLimits};
pub use config::{MetricConfig, Preset, StageWeights, DEFAULT_THRESHOLD};
pub use embeddings::EmbeddingTable;
pub use error::{Error, Result};
pub use evalharness::{kendall_tau, oracle_threshold_sweep, PairwiseJudgment, SweepResult, TauResult};
pub use matchgen::{generate_candidates, CandidateMatch, MatchSet, Span, Stage};
pub use metric::{Meteor, SegmentResult};
pub use resources::{ParaphraseTable, Resources, SynonymTable};
pub use scorer::{score_from_stats, ScoreBreakdown, SegmentStats};
pub use text::{stem, tokenize, Language, Token, TokenSequence};
