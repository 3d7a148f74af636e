//! Metric configuration: enabled stages, weights, formula parameters,
//! vector threshold and resource paths, plus the five named presets.

use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matchgen::Stage;
use crate::text::Language;

pub const DEFAULT_THRESHOLD: f64 = 0.80;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Preset {
    Baseline,
    Dbnary,
    Vector,
    BaselineVector,
    DbnaryVector,
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::Baseline,
        Preset::Dbnary,
        Preset::Vector,
        Preset::BaselineVector,
        Preset::DbnaryVector,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Baseline => "baseline",
            Preset::Dbnary => "dbnary",
            Preset::Vector => "vector",
            Preset::BaselineVector => "baseline+vector",
            Preset::DbnaryVector => "dbnary+vector",
        }
    }

    /// Stage set for a target language. The baseline only has a synonym
    /// resource for English.
    pub fn stages(self, language: Language) -> BTreeSet<Stage> {
        use Stage::*;
        let baseline: &[Stage] = if language == Language::En {
            &[Exact, Stem, Synonym, Paraphrase]
        } else {
            &[Exact, Stem, Paraphrase]
        };
        let dbnary: &[Stage] = &[Exact, Stem, Synonym, Paraphrase];
        let stages: Vec<Stage> = match self {
            Preset::Baseline => baseline.to_vec(),
            Preset::Dbnary => dbnary.to_vec(),
            Preset::Vector => vec![Exact, Vector],
            Preset::BaselineVector => baseline.iter().copied().chain([Vector]).collect(),
            Preset::DbnaryVector => dbnary.iter().copied().chain([Vector]).collect(),
        };
        stages.into_iter().collect()
    }

    pub fn uses_vector(self) -> bool {
        matches!(self, Preset::Vector | Preset::BaselineVector | Preset::DbnaryVector)
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                Error::config(format!(
                    "preset: unknown preset {s:?} (expected baseline, dbnary, vector, baseline+vector or dbnary+vector)"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StageWeights {
    pub exact: f64,
    pub stem: f64,
    pub synonym: f64,
    pub paraphrase: f64,
    pub vector: f64,
}

impl Default for StageWeights {
    fn default() -> Self {
        StageWeights {
            exact: 1.0,
            stem: 0.6,
            synonym: 0.8,
            paraphrase: 0.6,
            vector: 0.8,
        }
    }
}

impl StageWeights {
    pub fn get(&self, stage: Stage) -> f64 {
        match stage {
            Stage::Exact => self.exact,
            Stage::Stem => self.stem,
            Stage::Synonym => self.synonym,
            Stage::Paraphrase => self.paraphrase,
            Stage::Vector => self.vector,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ResourcePaths {
    pub embeddings: Option<PathBuf>,
    pub synonyms: Option<PathBuf>,
    pub paraphrases: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricConfig {
    pub preset: Option<Preset>,
    pub language: Language,
    pub stages: BTreeSet<Stage>,
    pub weights: StageWeights,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Present iff the Vector stage is enabled.
    pub threshold: Option<f64>,
    pub paths: ResourcePaths,
}

impl MetricConfig {
    pub fn from_preset(preset: Preset, language: Language) -> Self {
        MetricConfig {
            preset: Some(preset),
            language,
            stages: preset.stages(language),
            weights: StageWeights::default(),
            alpha: 0.9,
            beta: 3.0,
            gamma: 0.5,
            threshold: preset.uses_vector().then_some(DEFAULT_THRESHOLD),
            paths: ResourcePaths::default(),
        }
    }

    /// Config with an explicit stage list and default parameters.
    pub fn with_stages(language: Language, stages: impl IntoIterator<Item = Stage>) -> Self {
        let stages: BTreeSet<Stage> = stages.into_iter().collect();
        let threshold = stages.contains(&Stage::Vector).then_some(DEFAULT_THRESHOLD);
        MetricConfig {
            preset: None,
            language,
            stages,
            threshold,
            ..MetricConfig::from_preset(Preset::Baseline, language)
        }
    }

    pub fn enabled(&self, stage: Stage) -> bool {
        self.stages.contains(&stage)
    }

    pub fn threshold_or_default(&self) -> f64 {
        self.threshold.unwrap_or(DEFAULT_THRESHOLD)
    }

    pub fn preset_name(&self) -> &'static str {
        self.preset.map(Preset::name).unwrap_or("custom")
    }

    /// Check parameter ranges and the stage/threshold invariant. Resource
    /// presence is checked separately by [`MetricConfig::validate_paths`].
    pub fn validate(&self) -> Result<()> {
        if self.stages.is_empty() {
            return Err(Error::config("preset: no matching stage enabled"));
        }
        for (key, w) in [
            ("weights.exact", self.weights.exact),
            ("weights.stem", self.weights.stem),
            ("weights.synonym", self.weights.synonym),
            ("weights.paraphrase", self.weights.paraphrase),
            ("weights.vector", self.weights.vector),
        ] {
            if !(w > 0.0 && w <= 1.0) {
                return Err(Error::config(format!("{key}: {w} outside (0, 1]")));
            }
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::config(format!("alpha: {} outside (0, 1)", self.alpha)));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::config(format!("beta: {} must be positive", self.beta)));
        }
        if !(self.gamma >= 0.0 && self.gamma < 1.0) {
            return Err(Error::config(format!("gamma: {} outside [0, 1)", self.gamma)));
        }
        match (self.enabled(Stage::Vector), self.threshold) {
            (true, None) => return Err(Error::config("threshold: required when the vector stage is enabled")),
            (false, Some(_)) => {
                return Err(Error::config(format!(
                    "threshold: set but preset {} has no vector stage",
                    self.preset_name()
                )))
            }
            (true, Some(t)) if !(0.0..=1.0).contains(&t) => {
                return Err(Error::config(format!("threshold: {t} outside [0, 1]")))
            }
            _ => {}
        }
        Ok(())
    }

    pub fn validate_paths(&self) -> Result<()> {
        let needs = [
            (Stage::Synonym, &self.paths.synonyms, "paths.synonyms"),
            (Stage::Paraphrase, &self.paths.paraphrases, "paths.paraphrases"),
            (Stage::Vector, &self.paths.embeddings, "paths.embeddings"),
        ];
        for (stage, path, key) in needs {
            if !self.enabled(stage) {
                continue;
            }
            match path {
                None => {
                    return Err(Error::config(format!(
                        "{key}: required by the {} stage of preset {}",
                        stage.name(),
                        self.preset_name()
                    )))
                }
                Some(p) if !p.is_file() => {
                    return Err(Error::config(format!("{key}: {} is not a readable file", p.display())))
                }
                Some(_) => {}
            }
        }
        Ok(())
    }

    /// Canonical `key = value` rendering, used for hashing and reports.
    pub fn canonical(&self) -> String {
        let stages: Vec<&str> = self.stages.iter().map(|s| s.name()).collect();
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        let mut lines = vec![
            format!("preset = {}", self.preset_name()),
            format!("language = {}", self.language),
            format!("stages = {}", stages.join(",")),
            format!("alpha = {}", self.alpha),
            format!("beta = {}", self.beta),
            format!("gamma = {}", self.gamma),
            format!("weights.exact = {}", self.weights.exact),
            format!("weights.stem = {}", self.weights.stem),
            format!("weights.synonym = {}", self.weights.synonym),
            format!("weights.paraphrase = {}", self.weights.paraphrase),
            format!("weights.vector = {}", self.weights.vector),
        ];
        if let Some(t) = self.threshold {
            lines.push(format!("threshold = {t}"));
        }
        lines.push(format!("paths.embeddings = {}", path(&self.paths.embeddings)));
        lines.push(format!("paths.synonyms = {}", path(&self.paths.synonyms)));
        lines.push(format!("paths.paraphrases = {}", path(&self.paths.paraphrases)));
        lines.join("\n")
    }

    /// First 16 hex digits of the SHA-256 of [`MetricConfig::canonical`].
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}
