//! End-to-end runs: split, augment, subsample, tag, ensemble, post-process
//! and evaluate, driven by a [`PipelineConfig`].
//!
//! The gazetteer tagger stands in for a trained model: member `i` builds its
//! lexicon from the gold surfaces of training subset `i` plus the manual
//! list, then tags the validation set.

mod config;

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::augment::{augment_pl1, augment_pl2, AugmentConfig, AugmentError, AugmentStats};
use crate::corpus::{read_dataset, serialize_dataset, stratified_split, CorpusError, Dataset, Format};
use crate::ensemble::{aggregate_dataset, average, EnsembleError, Params};
use crate::eval::{categorize_errors, evaluate, ErrorTally, EvalError, Report, SurfaceCounts, Table};
use crate::lexicon::{Lexicon, LexiconError};
use crate::postprocess::{postprocess, PostConfig};
use crate::sampling::{bootstrap_subsets, SamplingError, SubsetPlan};
use crate::tagger::{serialize_tracks, Gazetteer, GazetteerConfig, GazetteerError, TrackSet};

pub use config::{ConfigError, Mode, PipelineConfig};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Input { path: String, source: CorpusError },
    #[error("{path}: {source}")]
    Lexicon { path: String, source: LexiconError },
    #[error("split: {0}")]
    Split(CorpusError),
    #[error("augment: {0}")]
    Augment(#[from] AugmentError),
    #[error("subsets: {0}")]
    Sampling(#[from] SamplingError),
    #[error("tagger: {0}")]
    Gazetteer(#[from] GazetteerError),
    #[error("ensemble: {0}")]
    Ensemble(#[from] EnsembleError),
    #[error("post-processing: {0}")]
    Post(CorpusError),
    #[error("evaluation: {0}")]
    Eval(#[from] EvalError),
    #[error("{path}: {message}")]
    Output { path: String, message: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct Sizes {
    pub train: usize,
    pub valid: usize,
    pub augmented: usize,
    pub subset: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub name: String,
    #[serde(flatten)]
    pub report: Report<f64>,
}

/// Summary written as `report.json`.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub mode: String,
    pub seed: u64,
    pub models: usize,
    pub threshold: f64,
    pub post: bool,
    pub sizes: Sizes,
    pub augmentation: AugmentStats,
    pub metrics: Vec<Row>,
    /// Error breakdown of the final predictions.
    pub errors: ErrorTally,
}

impl RunReport {
    /// Row of the final predictions: `ensemble-post` when post-processing is
    /// on, otherwise `ensemble`.
    pub fn final_row(&self) -> &Row {
        self.metrics.last().expect("at least one row")
    }

    pub fn table(&self) -> String {
        let rows: Vec<(&str, Report<f64>)> = self.metrics.iter().map(|r| (r.name.as_str(), r.report)).collect();
        Table(&rows).to_string()
    }
}

/// Everything a run produced, in memory. Paths are relative to the output
/// directory and listed in a fixed order.
#[derive(Debug, Clone)]
pub struct Artifacts {
    pub files: Vec<(PathBuf, Vec<u8>)>,
    pub report: RunReport,
}

impl Artifacts {
    pub fn get(&self, path: &str) -> Option<&[u8]> {
        self.files
            .iter()
            .find(|(p, _)| p == Path::new(path))
            .map(|(_, b)| b.as_slice())
    }

    pub fn write_to(&self, dir: &Path) -> Result<(), PipelineError> {
        for (rel, bytes) in &self.files {
            let path = dir.join(rel);
            let fail = |e: std::io::Error| PipelineError::Output {
                path: path.display().to_string(),
                message: e.to_string(),
            };
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent).map_err(fail)?;
            }
            fs::write(&path, bytes).map_err(fail)?;
        }
        Ok(())
    }
}

fn read_input(path: &Path) -> Result<Dataset, PipelineError> {
    read_dataset(path, None).map_err(|source| PipelineError::Input {
        path: path.display().to_string(),
        source,
    })
}

fn extension(format: Format) -> &'static str {
    match format {
        Format::Jsonl => "jsonl",
        Format::Tsv => "tsv",
    }
}

/// Predictions of one track set at `threshold`.
fn threshold_predictions(
    valid: &Dataset,
    set: &TrackSet<f64>,
    threshold: f64,
) -> Result<Dataset, EnsembleError> {
    aggregate_dataset(valid, std::slice::from_ref(set), &Params::equal(1, threshold)?)
}

pub fn run(cfg: &PipelineConfig) -> Result<Artifacts, PipelineError> {
    cfg.validate()?;
    let corpus_path = cfg.corpus.as_deref().expect("validated");
    let corpus = read_input(corpus_path)?;
    let (train, valid) = match &cfg.validation {
        Some(path) => (corpus, read_input(path)?),
        None => stratified_split(&corpus, cfg.train_ratio, cfg.seed).map_err(PipelineError::Split)?,
    };

    let manual = match &cfg.lexicon {
        Some(path) => Lexicon::read_manual(path).map_err(|source| PipelineError::Lexicon {
            path: path.display().to_string(),
            source,
        })?,
        None => Lexicon::new(),
    };

    let aug_cfg = AugmentConfig {
        target_positive_ratio: cfg.target_positive_ratio,
        concat_pairs: cfg.concat_pairs,
        replacement_per_positive: cfg.replacements,
        separator: cfg.separator.clone(),
        seed: cfg.seed,
        paraphrase_command: cfg.paraphrase_command.clone(),
    };
    let (augmented, stats) = match cfg.mode {
        Mode::Pl1 => augment_pl1(&train, &aug_cfg)?,
        Mode::Pl2 => {
            let mut replacement = manual.clone();
            replacement.add_dataset(&train);
            augment_pl2(&train, &replacement, &aug_cfg)?
        }
    };

    let k = cfg.models();
    // a single member trains on the whole augmented set
    let subsets = if k == 1 {
        vec![augmented.clone()]
    } else {
        let plan = SubsetPlan {
            k,
            sample_fraction: cfg.sample_fraction,
            seed: cfg.seed,
        };
        bootstrap_subsets(&augmented, &plan)?
    };

    let mut members = Vec::with_capacity(k);
    for subset in &subsets {
        let mut lexicon = manual.clone();
        lexicon.add_dataset(subset);
        let gaz_cfg = GazetteerConfig {
            lexicon,
            exact_prob: cfg.exact_prob,
            fuzzy_prob: cfg.fuzzy_prob,
            max_edit_distance: cfg.max_edit_distance,
        };
        members.push(Gazetteer::new(&gaz_cfg)?.tag_dataset(&valid));
    }
    let averaged = average(&members)?;
    let ensemble = aggregate_dataset(&valid, &members, &Params::equal(k, cfg.threshold)?)?;
    let post = if cfg.post {
        Some(postprocess(&ensemble, &PostConfig::default()).map_err(PipelineError::Post)?)
    } else {
        None
    };

    let mut metrics = Vec::new();
    for (i, set) in members.iter().enumerate() {
        let predicted = threshold_predictions(&valid, set, cfg.threshold)?;
        metrics.push(Row {
            name: format!("model{i}"),
            report: evaluate(&valid, &predicted)?,
        });
    }
    metrics.push(Row {
        name: "ensemble".to_string(),
        report: evaluate(&valid, &ensemble)?,
    });
    if let Some(post) = &post {
        metrics.push(Row {
            name: "ensemble-post".to_string(),
            report: evaluate(&valid, post)?,
        });
    }
    let final_predictions = post.as_ref().unwrap_or(&ensemble);
    let errors = categorize_errors(&valid, final_predictions, &SurfaceCounts::from_datasets([&augmented]))?;

    let report = RunReport {
        mode: cfg.mode.to_string(),
        seed: cfg.seed,
        models: k,
        threshold: cfg.threshold,
        post: cfg.post,
        sizes: Sizes {
            train: train.len(),
            valid: valid.len(),
            augmented: augmented.len(),
            subset: subsets[0].len(),
        },
        augmentation: stats,
        metrics,
        errors,
    };

    let ext = extension(cfg.format);
    let data = |d: &Dataset| serialize_dataset(d, cfg.format);
    let mut files: Vec<(PathBuf, Vec<u8>)> = vec![
        (format!("train.{ext}").into(), data(&train)),
        (format!("valid.{ext}").into(), data(&valid)),
        (format!("augmented.{ext}").into(), data(&augmented)),
    ];
    for (i, subset) in subsets.iter().enumerate() {
        files.push((format!("subsets/subset{i}.{ext}").into(), data(subset)));
    }
    for (i, set) in members.iter().enumerate() {
        files.push((format!("predictions/model{i}.jsonl").into(), serialize_tracks(set)));
    }
    files.push(("predictions/average.jsonl".into(), serialize_tracks(&averaged)));
    files.push((format!("ensemble.{ext}").into(), data(&ensemble)));
    if let Some(post) = &post {
        files.push((format!("ensemble-post.{ext}").into(), data(post)));
    }
    let mut json = serde_json::to_vec_pretty(&report).expect("serializing report");
    json.push(b'\n');
    files.push(("report.json".into(), json));
    files.push(("report.txt".into(), report.table().into_bytes()));
    Ok(Artifacts { files, report })
}

/// [`run`], then write every artifact under `out_dir`.
pub fn run_to_dir(cfg: &PipelineConfig, out_dir: &Path) -> Result<Artifacts, PipelineError> {
    let artifacts = run(cfg)?;
    artifacts.write_to(out_dir)?;
    Ok(artifacts)
}
