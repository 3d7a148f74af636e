//! Command-line front end: config parsing and the `score`, `correlate`,
//! `sweep` and `inspect` commands.
//!
//! Every report starts with a `#` header recording the preset and config
//! hash. Output rows are ordered by segment id so the bytes do not depend on
//! worker scheduling.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{MetricConfig, Preset};
use crate::error::{Error, Result};
use crate::evalharness::{
    average_tau, default_grid, load_judgments, load_scores, oracle_threshold_sweep, parse_grid, read_segments,
    tau_by_language_pair, Dataset, ScoreMap, SweepResult, TauResult, TIE_CONVENTION,
};
use crate::matchgen::{CandidateMatch, Stage};
use crate::metric::{Meteor, SegmentResult};
use crate::scorer::ScoreBreakdown;
use crate::text::{Language, TokenSequence};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "METEOR_E_THREADS";

pub const CONFIG_KEYS: [&str; 14] = [
    "preset",
    "language",
    "alpha",
    "beta",
    "gamma",
    "threshold",
    "weights.exact",
    "weights.stem",
    "weights.synonym",
    "weights.paraphrase",
    "weights.vector",
    "paths.embeddings",
    "paths.synonyms",
    "paths.paraphrases",
];

#[derive(Debug, Parser)]
#[command(name = "meteor-e", version, about = "METEOR-family MT evaluation with embedding-based matching")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,

    #[command(flatten)]
    pub options: MetricOptions,

    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = ReportFormat::Tsv, global = true)]
    pub format: ReportFormat,
}

#[derive(Debug, Args, Default)]
pub struct MetricOptions {
    /// Flat `key = value` config file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// baseline, dbnary, vector, baseline+vector or dbnary+vector
    #[arg(long, global = true)]
    pub preset: Option<String>,
    /// Target language: en, fr, de or ru
    #[arg(long, global = true)]
    pub language: Option<String>,
    /// Vector stage cosine threshold in [0, 1]
    #[arg(long, global = true)]
    pub threshold: Option<String>,
    /// Word vectors in `vocab dim` text format
    #[arg(long, global = true)]
    pub embeddings: Option<PathBuf>,
    /// Synonym table, `lemma<TAB>id ...`
    #[arg(long, global = true)]
    pub synonyms: Option<PathBuf>,
    /// Paraphrase table, `phrase<TAB>phrase<TAB>weight`
    #[arg(long, global = true)]
    pub paraphrases: Option<PathBuf>,
    /// Override any config key, e.g. `--set weights.stem=0.5`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub set: Vec<String>,
}

impl MetricOptions {
    fn overrides(&self) -> Result<Vec<(String, String)>> {
        let mut out = Vec::new();
        let mut push = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                out.push((k.to_string(), v));
            }
        };
        push("preset", self.preset.clone());
        push("language", self.language.clone());
        push("threshold", self.threshold.clone());
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        push("paths.embeddings", path(&self.embeddings));
        push("paths.synonyms", path(&self.synonyms));
        push("paths.paraphrases", path(&self.paraphrases));
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::config(format!("--set {kv:?}: expected KEY=VALUE")))?;
            out.push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok(out)
    }
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Score hypotheses against references, one segment per line.
    Score {
        #[arg(long)]
        hyp: PathBuf,
        #[arg(long = "ref")]
        reference: PathBuf,
        /// System name for the report (default: hypothesis file stem).
        #[arg(long)]
        system: Option<String>,
    },
    /// Kendall's τ between per-segment scores and human judgments.
    Correlate {
        /// Score TSV, optionally scoped to one language pair as `LP=PATH`.
        #[arg(long, required = true)]
        scores: Vec<String>,
        #[arg(long)]
        judgments: PathBuf,
    },
    /// Average τ as a function of the vector threshold.
    Sweep {
        /// Manifest of `lang_pair<TAB>system<TAB>path` lines (`@ref` marks references).
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        judgments: PathBuf,
        /// `lo:hi:step`, default 0.50:1.00:0.01.
        #[arg(long)]
        grid: Option<String>,
    },
    /// Show the matched word pairs of one segment with their stages.
    Inspect {
        #[arg(long)]
        hyp: PathBuf,
        #[arg(long = "ref")]
        reference: PathBuf,
        /// 1-based segment (line) number.
        #[arg(long)]
        segment: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Tsv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Score {
        hyp: PathBuf,
        reference: PathBuf,
        system: String,
    },
    Correlate {
        scores: Vec<(Option<String>, PathBuf)>,
        judgments: PathBuf,
    },
    Sweep {
        dataset: PathBuf,
        judgments: PathBuf,
        grid: Vec<f64>,
    },
    Inspect {
        hyp: PathBuf,
        reference: PathBuf,
        segment: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub metric: MetricConfig,
    pub output: Option<PathBuf>,
    pub format: ReportFormat,
}

/// Read `key = value` lines. Relative `paths.*` values are resolved against
/// the file's directory.
pub fn read_config_file(path: &Path) -> Result<Vec<(String, String)>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(path, idx + 1, format!("expected `key = value`, found {line:?}")))?;
        let key = key.trim().to_string();
        let mut value = value.trim().to_string();
        if key.starts_with("paths.") && !value.is_empty() && Path::new(&value).is_relative() {
            value = base.join(&value).display().to_string();
        }
        out.push((key, value));
    }
    Ok(out)
}

/// Build a metric config from key-value pairs; later pairs win.
pub fn metric_config_from_pairs(pairs: &[(String, String)]) -> Result<MetricConfig> {
    let mut values: BTreeMap<&str, &str> = BTreeMap::new();
    for (k, v) in pairs {
        let key = CONFIG_KEYS
            .iter()
            .find(|known| **known == k.as_str())
            .ok_or_else(|| Error::config(format!("{k}: unknown config key")))?;
        values.insert(key, v.as_str());
    }
    let preset: Preset = values.get("preset").copied().unwrap_or("baseline").parse()?;
    let language: Language = values
        .get("language")
        .copied()
        .unwrap_or("en")
        .parse()
        .map_err(|e: Error| Error::config(format!("language: {e}")))?;
    let mut config = MetricConfig::from_preset(preset, language);

    let number = |key: &str| -> Result<Option<f64>> {
        values
            .get(key)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| Error::config(format!("{key}: {v:?} is not a number")))
            })
            .transpose()
    };
    if let Some(v) = number("alpha")? {
        config.alpha = v;
    }
    if let Some(v) = number("beta")? {
        config.beta = v;
    }
    if let Some(v) = number("gamma")? {
        config.gamma = v;
    }
    if let Some(v) = number("threshold")? {
        config.threshold = Some(v);
    }
    for (key, slot) in [
        ("weights.exact", &mut config.weights.exact),
        ("weights.stem", &mut config.weights.stem),
        ("weights.synonym", &mut config.weights.synonym),
        ("weights.paraphrase", &mut config.weights.paraphrase),
        ("weights.vector", &mut config.weights.vector),
    ] {
        if let Some(v) = number(key)? {
            *slot = v;
        }
    }
    let path = |key: &str| values.get(key).filter(|v| !v.is_empty()).map(PathBuf::from);
    config.paths.embeddings = path("paths.embeddings");
    config.paths.synonyms = path("paths.synonyms");
    config.paths.paraphrases = path("paths.paraphrases");
    config.validate()?;
    Ok(config)
}

/// Config file (if any) overlaid with flag overrides.
pub fn parse_config(file: Option<&Path>, overrides: &[(String, String)]) -> Result<MetricConfig> {
    let mut pairs = match file {
        Some(p) => read_config_file(p)?,
        None => Vec::new(),
    };
    pairs.extend_from_slice(overrides);
    metric_config_from_pairs(&pairs)
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self> {
        let metric = parse_config(cli.options.config.as_deref(), &cli.options.overrides()?)?;
        let command = match cli.command {
            CliCommand::Score { hyp, reference, system } => {
                let system = system.unwrap_or_else(|| {
                    hyp.file_stem()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_else(|| "system".into())
                });
                if system.is_empty() || system.contains(char::is_whitespace) {
                    return Err(Error::config(format!("--system: bad system name {system:?}")));
                }
                Command::Score { hyp, reference, system }
            }
            CliCommand::Correlate { scores, judgments } => Command::Correlate {
                scores: scores.iter().map(|s| parse_score_source(s)).collect(),
                judgments,
            },
            CliCommand::Sweep { dataset, judgments, grid } => Command::Sweep {
                dataset,
                judgments,
                grid: match grid {
                    Some(g) => parse_grid(&g)?,
                    None => default_grid(),
                },
            },
            CliCommand::Inspect {
                hyp,
                reference,
                segment,
            } => {
                if segment == 0 {
                    return Err(Error::config("--segment: segment numbers start at 1"));
                }
                Command::Inspect { hyp, reference, segment }
            }
        };
        let config = RunConfig {
            command,
            metric,
            output: cli.output,
            format: cli.format,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.metric.validate()?;
        match &self.command {
            Command::Correlate { .. } => Ok(()),
            Command::Sweep { .. } if !self.metric.enabled(Stage::Vector) => Err(Error::config(format!(
                "preset: sweep needs a vector preset, got {}",
                self.metric.preset_name()
            ))),
            _ => self.metric.validate_paths(),
        }
    }
}

fn parse_score_source(s: &str) -> (Option<String>, PathBuf) {
    match s.split_once('=') {
        Some((lp, path)) if !lp.is_empty() && !lp.contains('/') => (Some(lp.to_string()), PathBuf::from(path)),
        _ => (None, PathBuf::from(s)),
    }
}

/// Worker count from `METEOR_E_THREADS`, capped at the machine's parallelism.
pub fn worker_count() -> usize {
    let available = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    match std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        Some(n) if n > 0 => n.min(available),
        _ => available,
    }
}

pub fn run(config: &RunConfig) -> Result<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count())
        .build()
        .map_err(|e| Error::Internal(format!("worker pool: {e}")))?;
    let report = pool.install(|| render(config))?;
    write_report(config.output.as_deref(), &report)
}

/// Produce the report text for a command.
pub fn render(config: &RunConfig) -> Result<String> {
    let header = header_line(&config.metric);
    match &config.command {
        Command::Score { hyp, reference, system } => {
            let meteor = Meteor::load(config.metric.clone())?;
            let report = score_files(&meteor, hyp, reference, system)?;
            Ok(match config.format {
                ReportFormat::Tsv => report.to_tsv(&header),
                ReportFormat::Json => to_json(&header, &config.metric, &report)?,
            })
        }
        Command::Correlate { scores, judgments } => {
            let report = correlate(scores, judgments)?;
            Ok(match config.format {
                ReportFormat::Tsv => report.to_tsv(&header),
                ReportFormat::Json => to_json(&header, &config.metric, &report)?,
            })
        }
        Command::Sweep {
            dataset,
            judgments,
            grid,
        } => {
            let meteor = Meteor::load(config.metric.clone())?;
            let dataset = Dataset::load(dataset, judgments)?;
            let result = oracle_threshold_sweep(&dataset, &meteor, grid)?;
            Ok(match config.format {
                ReportFormat::Tsv => sweep_tsv(&header, &result),
                ReportFormat::Json => to_json(&header, &config.metric, &result)?,
            })
        }
        Command::Inspect {
            hyp,
            reference,
            segment,
        } => {
            let meteor = Meteor::load(config.metric.clone())?;
            let report = inspect(&meteor, hyp, reference, *segment)?;
            Ok(match config.format {
                ReportFormat::Tsv => report.to_text(&header),
                ReportFormat::Json => to_json(&header, &config.metric, &report)?,
            })
        }
    }
}

pub fn header_line(metric: &MetricConfig) -> String {
    let threshold = metric.threshold.map(|t| format!(" threshold={t}")).unwrap_or_default();
    format!(
        "# meteor-e preset={} language={} config={}{threshold} ties={TIE_CONVENTION}",
        metric.preset_name(),
        metric.language,
        metric.hash(),
    )
}

#[derive(Serialize)]
struct JsonReport<'a, T: Serialize> {
    header: &'a str,
    preset: &'a str,
    config_hash: String,
    ties: &'a str,
    report: &'a T,
}

fn to_json<T: Serialize>(header: &str, metric: &MetricConfig, report: &T) -> Result<String> {
    let wrapped = JsonReport {
        header,
        preset: metric.preset_name(),
        config_hash: metric.hash(),
        ties: TIE_CONVENTION,
        report,
    };
    let mut s = serde_json::to_string_pretty(&wrapped).map_err(|e| Error::Internal(format!("json: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Write to `path` through a temporary sibling so a failed run leaves no
/// partial file; `None` writes to stdout.
pub fn write_report(path: Option<&Path>, report: &str) -> Result<()> {
    match path {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(report.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Error::io("<stdout>", e))
        }
        Some(path) => {
            let mut tmp = path.as_os_str().to_owned();
            tmp.push(".partial");
            let tmp = PathBuf::from(tmp);
            let result = fs::write(&tmp, report).and_then(|_| fs::rename(&tmp, path));
            if let Err(e) = result {
                let _ = fs::remove_file(&tmp);
                return Err(Error::io(path, e));
            }
            Ok(())
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SegmentRow {
    pub system: String,
    pub segment_id: u64,
    pub score: f64,
    pub precision: f64,
    pub recall: f64,
    pub fmean: f64,
    pub penalty: f64,
    pub chunks: usize,
    pub matches: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CorpusRow {
    pub system: String,
    /// Corpus score ×100.
    pub score: f64,
    pub precision: f64,
    pub recall: f64,
    pub fmean: f64,
    pub penalty: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScoreReport {
    pub segments: Vec<SegmentRow>,
    pub corpus: CorpusRow,
}

impl ScoreReport {
    pub fn to_tsv(&self, header: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{header}");
        let _ = writeln!(out, "# system\tsegment_id\tscore\tP\tR\tfmean\tpenalty\tchunks\tmatches");
        for r in &self.segments {
            let _ = writeln!(
                out,
                "{}\t{}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{}\t{}",
                r.system, r.segment_id, r.score, r.precision, r.recall, r.fmean, r.penalty, r.chunks, r.matches
            );
        }
        let c = &self.corpus;
        let _ = writeln!(
            out,
            "# corpus\t{}\t{:.2}\t{:.6}\t{:.6}\t{:.6}\t{:.6}",
            c.system, c.score, c.precision, c.recall, c.fmean, c.penalty
        );
        out
    }
}

fn read_pair(hyp: &Path, reference: &Path) -> Result<(Vec<String>, Vec<String>)> {
    let h = read_segments(hyp)?;
    let r = read_segments(reference)?;
    if h.len() != r.len() {
        return Err(Error::Evaluation(format!(
            "{} has {} segments but {} has {}",
            hyp.display(),
            h.len(),
            reference.display(),
            r.len()
        )));
    }
    if h.is_empty() {
        return Err(Error::Evaluation(format!("{} has no segments", hyp.display())));
    }
    Ok((h, r))
}

pub fn score_segments(meteor: &Meteor, hyps: &[String], refs: &[String]) -> Result<Vec<SegmentResult>> {
    hyps.par_iter()
        .zip(refs.par_iter())
        .map(|(h, r)| meteor.score(h, r))
        .collect()
}

pub fn score_files(meteor: &Meteor, hyp: &Path, reference: &Path, system: &str) -> Result<ScoreReport> {
    let (hyps, refs) = read_pair(hyp, reference)?;
    let results = score_segments(meteor, &hyps, &refs)?;
    let corpus: ScoreBreakdown = meteor.corpus(&results)?;
    let segments = results
        .iter()
        .enumerate()
        .map(|(i, r)| SegmentRow {
            system: system.to_string(),
            segment_id: i as u64 + 1,
            score: r.score.score,
            precision: r.score.precision,
            recall: r.score.recall,
            fmean: r.score.fmean,
            penalty: r.score.penalty,
            chunks: r.stats.chunks,
            matches: r.stats.matches,
        })
        .collect();
    Ok(ScoreReport {
        segments,
        corpus: CorpusRow {
            system: system.to_string(),
            score: corpus.score * 100.0,
            precision: corpus.precision,
            recall: corpus.recall,
            fmean: corpus.fmean,
            penalty: corpus.penalty,
        },
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrelationReport {
    pub per_pair: BTreeMap<String, TauResult>,
    pub average_tau: f64,
}

impl CorrelationReport {
    pub fn to_tsv(&self, header: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{header}");
        let _ = writeln!(out, "# lang_pair\tconcordant\tdiscordant\ttau");
        for (lp, r) in &self.per_pair {
            let _ = writeln!(out, "{lp}\t{}\t{}\t{:.6}", r.concordant, r.discordant, r.tau);
        }
        let _ = writeln!(out, "average\t-\t-\t{:.6}", self.average_tau);
        out
    }
}

pub fn correlate(sources: &[(Option<String>, PathBuf)], judgments: &Path) -> Result<CorrelationReport> {
    let judgments = load_judgments(judgments)?;
    let mut scoped: BTreeMap<String, ScoreMap> = BTreeMap::new();
    let mut shared = ScoreMap::new();
    for (lp, path) in sources {
        let map = load_scores(path)?;
        let target = match lp {
            Some(lp) => scoped.entry(lp.clone()).or_default(),
            None => &mut shared,
        };
        for (k, v) in map {
            if target.insert(k.clone(), v).is_some() {
                return Err(Error::Evaluation(format!(
                    "score for {}:{} supplied twice",
                    k.0, k.1
                )));
            }
        }
    }
    let per_pair = tau_by_language_pair(&judgments, |lp| Some(scoped.get(lp).unwrap_or(&shared)))?;
    let average_tau = average_tau(&per_pair)?;
    Ok(CorrelationReport { per_pair, average_tau })
}

pub fn sweep_tsv(header: &str, result: &SweepResult) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{header}");
    let pairs: Vec<&String> = result.grid.first().map(|p| p.per_pair.keys().collect()).unwrap_or_default();
    let mut cols = String::from("# threshold\taverage_tau");
    for lp in &pairs {
        let _ = write!(cols, "\t{lp}");
    }
    let _ = writeln!(out, "{cols}");
    for p in &result.grid {
        let _ = write!(out, "{:.4}\t{:.6}", p.threshold, p.average_tau);
        for lp in &pairs {
            let _ = write!(out, "\t{:.6}", p.per_pair[*lp].tau);
        }
        out.push('\n');
    }
    let _ = writeln!(out, "# best\t{:.4}\t{:.6}", result.best_threshold, result.best_tau);
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct InspectLine {
    pub hyp: String,
    #[serde(rename = "ref")]
    pub reference: String,
    pub stage: Stage,
    pub similarity: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InspectReport {
    pub segment_id: usize,
    pub hypothesis: String,
    pub reference: String,
    pub matches: Vec<InspectLine>,
    pub chunks: usize,
    pub score: f64,
}

impl InspectReport {
    pub fn to_text(&self, header: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{header}");
        let _ = writeln!(out, "# segment {}", self.segment_id);
        let _ = writeln!(out, "# hyp: {}", self.hypothesis);
        let _ = writeln!(out, "# ref: {}", self.reference);
        for m in &self.matches {
            let _ = write!(out, "{} {} {}", m.hyp, m.reference, m.stage);
            if let Some(sim) = m.similarity {
                let _ = write!(out, " {sim:.2}");
            }
            out.push('\n');
        }
        let _ = writeln!(out, "# chunks {} score {:.6}", self.chunks, self.score);
        out
    }
}

fn phrase(seq: &TokenSequence, m: &crate::matchgen::Span) -> String {
    seq.tokens[m.start..m.end]
        .iter()
        .map(|t| t.surface.as_str())
        .collect::<Vec<_>>()
        .join("_")
}

pub fn inspect_segment(meteor: &Meteor, hyp: &str, reference: &str, segment_id: usize) -> Result<InspectReport> {
    let h = meteor.tokenize(hyp);
    let r = meteor.tokenize(reference);
    let result = meteor.score_tokens(&h, &r)?;
    let matches = result
        .alignment
        .matches
        .iter()
        .map(|m: &CandidateMatch| InspectLine {
            hyp: phrase(&h, &m.hyp),
            reference: phrase(&r, &m.reference),
            stage: m.stage,
            similarity: m.similarity,
        })
        .collect();
    Ok(InspectReport {
        segment_id,
        hypothesis: h.joined(),
        reference: r.joined(),
        matches,
        chunks: result.alignment.chunks,
        score: result.score.score,
    })
}

pub fn inspect(meteor: &Meteor, hyp: &Path, reference: &Path, segment: usize) -> Result<InspectReport> {
    let (hyps, refs) = read_pair(hyp, reference)?;
    if segment == 0 || segment > hyps.len() {
        return Err(Error::config(format!(
            "--segment: {segment} out of range 1..={}",
            hyps.len()
        )));
    }
    inspect_segment(meteor, &hyps[segment - 1], &refs[segment - 1], segment)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(v: &[(&str, &str)]) -> Vec<(String, String)> {
        v.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn vector_preset_expansion() {
        let c = metric_config_from_pairs(&pairs(&[("preset", "vector"), ("language", "fr")])).unwrap();
        assert_eq!(c.stages.iter().copied().collect::<Vec<_>>(), [Stage::Exact, Stage::Vector]);
        assert_eq!(c.threshold, Some(0.80));
    }

    #[test]
    fn baseline_by_language() {
        let en = metric_config_from_pairs(&pairs(&[("preset", "baseline"), ("language", "en")])).unwrap();
        assert!(en.enabled(Stage::Synonym));
        let fr = metric_config_from_pairs(&pairs(&[("preset", "baseline"), ("language", "fr")])).unwrap();
        assert_eq!(
            fr.stages.iter().copied().collect::<Vec<_>>(),
            [Stage::Exact, Stage::Stem, Stage::Paraphrase]
        );
    }

    #[test]
    fn config_errors_name_the_key() {
        let err = metric_config_from_pairs(&pairs(&[("colour", "red")])).unwrap_err();
        assert!(err.to_string().contains("colour"), "{err}");
        let err = metric_config_from_pairs(&pairs(&[("preset", "vector"), ("threshold", "1.5")])).unwrap_err();
        assert!(err.to_string().contains("threshold"), "{err}");
        let err = metric_config_from_pairs(&pairs(&[("alpha", "x")])).unwrap_err();
        assert!(err.to_string().contains("alpha"), "{err}");
        let err = metric_config_from_pairs(&pairs(&[("language", "es")])).unwrap_err();
        assert!(err.to_string().contains("language"), "{err}");
    }

    #[test]
    fn later_pairs_override() {
        let c = metric_config_from_pairs(&pairs(&[
            ("preset", "vector"),
            ("threshold", "0.7"),
            ("threshold", "0.75"),
            ("weights.vector", "0.5"),
        ]))
        .unwrap();
        assert_eq!(c.threshold, Some(0.75));
        assert_eq!(c.weights.vector, 0.5);
    }

    #[test]
    fn score_sources() {
        assert_eq!(parse_score_source("fr-en=a.tsv"), (Some("fr-en".into()), PathBuf::from("a.tsv")));
        assert_eq!(parse_score_source("a.tsv"), (None, PathBuf::from("a.tsv")));
    }
}
