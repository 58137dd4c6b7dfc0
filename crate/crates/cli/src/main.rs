mod cli;

use std::fs;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;
use log::info;

use rxtweet::augment::{augment_pl1, augment_pl2, AugmentConfig};
use rxtweet::corpus::{read_dataset, stratified_split, write_dataset};
use rxtweet::ensemble::{aggregate_dataset, average};
use rxtweet::eval::{categorize_errors, evaluate, SurfaceCounts, Table};
use rxtweet::hpo::{read_trial_log, EnsembleObjective, Method, Optimizer, TpeConfig, TrialLogWriter};
use rxtweet::pipeline::{run_to_dir, Mode, PipelineConfig};
use rxtweet::postprocess::{postprocess, Charset, PostConfig};
use rxtweet::sampling::{bootstrap_pairs, bootstrap_subsets, SubsetPlan};
use rxtweet::tagger::{read_tracks, write_tracks, Gazetteer};
use rxtweet::{
    Dataset, EnsembleParams, Format, GazetteerConfig, Lexicon, MetricsReport, PredictionSet, SearchSpace,
    TrialRecord,
};

use crate::cli::{Cli, Command, SearchMethod};

struct Io {
    format: Option<Format>,
}

impl Io {
    fn read(&self, path: &Path) -> Result<Dataset> {
        read_dataset(path, None).with_context(|| format!("{}", path.display()))
    }

    fn write(&self, path: &Path, dataset: &Dataset) -> Result<()> {
        create_parent(path)?;
        write_dataset(path, dataset, self.format).with_context(|| format!("{}", path.display()))
    }

    fn extension(&self) -> &'static str {
        match self.format {
            Some(Format::Tsv) => "tsv",
            _ => "jsonl",
        }
    }
}

fn create_parent(path: &Path) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("{}", parent.display()))?;
    }
    Ok(())
}

fn read_predictions(path: &Path) -> Result<PredictionSet> {
    read_tracks(path).with_context(|| format!("{}", path.display()))
}

fn read_lexicon(path: &Path) -> Result<Lexicon> {
    Lexicon::read_manual(path).with_context(|| format!("{}", path.display()))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    create_parent(path)?;
    fs::write(path, text).with_context(|| format!("{}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", describe(&e));
            ExitCode::FAILURE
        }
    }
}

/// Joins the error chain, skipping causes whose text an outer layer
/// already includes.
fn describe(e: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in e.chain() {
        let text = cause.to_string();
        if out.contains(&text) {
            continue;
        }
        if !out.is_empty() {
            out.push_str(": ");
        }
        out.push_str(&text);
    }
    out
}

fn run(cli: Cli) -> Result<()> {
    let io = Io { format: cli.format };
    match cli.command {
        Command::Split {
            input,
            ratio,
            seed,
            train_out,
            valid_out,
        } => {
            let dataset = io.read(&input)?;
            let (train, valid) = stratified_split(&dataset, ratio, seed).context("split")?;
            io.write(&train_out, &train)?;
            io.write(&valid_out, &valid)?;
            println!(
                "train: {} tweets ({} positive), valid: {} tweets ({} positive)",
                train.len(),
                train.positive_count(),
                valid.len(),
                valid.positive_count()
            );
        }
        Command::Augment {
            input,
            mode,
            lexicon,
            target,
            concat,
            replacements,
            separator,
            paraphrase_command,
            seed,
            output,
        } => {
            let train = io.read(&input)?;
            let cfg = AugmentConfig {
                target_positive_ratio: target,
                concat_pairs: concat,
                replacement_per_positive: replacements,
                separator,
                seed,
                paraphrase_command,
            };
            let (augmented, stats) = match mode {
                Mode::Pl1 => augment_pl1(&train, &cfg),
                Mode::Pl2 => {
                    let mut lex = match &lexicon {
                        Some(path) => read_lexicon(path)?,
                        None => Lexicon::new(),
                    };
                    lex.add_dataset(&train);
                    augment_pl2(&train, &lex, &cfg)
                }
            }
            .with_context(|| format!("augment {}", input.display()))?;
            io.write(&output, &augmented)?;
            println!("{}", serde_json::to_string(&stats)?);
        }
        Command::Subsets {
            input,
            k,
            fraction,
            seed,
            validation,
            out_dir,
        } => {
            let source = io.read(&input)?;
            let plan = SubsetPlan {
                k,
                sample_fraction: fraction,
                seed,
            };
            let ext = io.extension();
            match validation {
                None => {
                    for (i, subset) in bootstrap_subsets(&source, &plan)?.iter().enumerate() {
                        io.write(&out_dir.join(format!("subset{i}.{ext}")), subset)?;
                    }
                }
                Some(path) => {
                    let valid = io.read(&path)?;
                    for pair in bootstrap_pairs(&source, &valid, &plan)? {
                        io.write(&out_dir.join(format!("subset{}.{ext}", pair.index)), &pair.training)?;
                        io.write(&out_dir.join(format!("valid-subset{}.{ext}", pair.index)), &pair.validation)?;
                    }
                }
            }
            println!("wrote {k} subsets to {}", out_dir.display());
        }
        Command::Tag {
            dataset,
            lexicon_from,
            lexicon,
            exact_prob,
            fuzzy_prob,
            max_edit_distance,
            ingest,
            output,
        } => {
            let data = io.read(&dataset)?;
            let set = match ingest {
                Some(path) => {
                    let set = read_predictions(&path)?;
                    set.check_against(&data)
                        .with_context(|| format!("{} against {}", path.display(), dataset.display()))?;
                    set.ordered_like(&data)
                }
                None => {
                    let mut lex = match &lexicon {
                        Some(path) => read_lexicon(path)?,
                        None => Lexicon::new(),
                    };
                    for path in &lexicon_from {
                        lex.add_dataset(&io.read(path)?);
                    }
                    if lex.is_empty() {
                        bail!("the tagger needs a lexicon: pass --lexicon and/or --lexicon-from");
                    }
                    info!("lexicon has {} entries", lex.len());
                    let cfg = GazetteerConfig {
                        lexicon: lex,
                        exact_prob,
                        fuzzy_prob,
                        max_edit_distance,
                    };
                    Gazetteer::new(&cfg)?.tag_dataset(&data)
                }
            };
            create_parent(&output)?;
            write_tracks(&output, &set).with_context(|| format!("{}", output.display()))?;
        }
        Command::Ensemble {
            dataset,
            predictions,
            weights,
            threshold,
            average_out,
            output,
        } => {
            let data = io.read(&dataset)?;
            let sets = predictions.iter().map(|p| read_predictions(p)).collect::<Result<Vec<_>>>()?;
            let weights = if weights.is_empty() { vec![1.0; sets.len()] } else { weights };
            if weights.len() != sets.len() {
                bail!("{} prediction files but {} weights", sets.len(), weights.len());
            }
            let params = EnsembleParams::new(weights, threshold)?;
            let spans = aggregate_dataset(&data, &sets, &params)?;
            io.write(&output, &spans)?;
            if let Some(path) = average_out {
                create_parent(&path)?;
                write_tracks(&path, &average(&sets)?).with_context(|| format!("{}", path.display()))?;
            }
        }
        Command::Post {
            predictions,
            post,
            trim_chars,
            output,
        } => {
            let data = io.read(&predictions)?;
            let cfg = if post.is_on() {
                PostConfig {
                    strip_hashtags: true,
                    trim: Some(trim_chars.map(|s| s.chars().collect()).unwrap_or(Charset::NonAlphanumeric)),
                }
            } else {
                PostConfig::off()
            };
            let out = postprocess(&data, &cfg).with_context(|| format!("{}", predictions.display()))?;
            io.write(&output, &out)?;
        }
        Command::Eval {
            gold,
            predicted,
            train,
            json,
        } => {
            let g = io.read(&gold)?;
            let p = io.read(&predicted)?;
            let report: MetricsReport = evaluate(&g, &p)
                .with_context(|| format!("{} against {}", predicted.display(), gold.display()))?;
            let name = predicted.file_stem().and_then(|s| s.to_str()).unwrap_or("predicted");
            print!("{}", Table(&[(name, report)]));
            let mut value = serde_json::to_value(report)?;
            if !train.is_empty() {
                let train = train.iter().map(|t| io.read(t)).collect::<Result<Vec<_>>>()?;
                let tally = categorize_errors(&g, &p, &SurfaceCounts::from_datasets(&train))?;
                value["errors"] = serde_json::to_value(tally)?;
            }
            let text = serde_json::to_string_pretty(&value)?;
            println!("{text}");
            if let Some(path) = json {
                write_text(&path, &(text + "\n"))?;
            }
        }
        Command::Optimize {
            gold,
            predictions,
            method,
            budget,
            resolution,
            seed,
            log,
            fresh,
            best_out,
        } => {
            let g = io.read(&gold)?;
            let sets = predictions.iter().map(|p| read_predictions(p)).collect::<Result<Vec<_>>>()?;
            let objective = EnsembleObjective::new(&g, &sets)?;
            let space = SearchSpace::ensemble(sets.len())?;
            let (method, budget) = match method {
                SearchMethod::Grid => (Method::Grid { resolution }, budget.unwrap_or(usize::MAX)),
                SearchMethod::Tpe => (Method::Tpe(TpeConfig::default()), budget.unwrap_or(200)),
            };
            let optimizer = Optimizer {
                space,
                method,
                budget,
                seed,
            };
            let score = |p: &[f64]| objective.score(p);
            let outcome = match &log {
                Some(path) => {
                    let history: Vec<TrialRecord> = if fresh {
                        Vec::new()
                    } else {
                        read_trial_log(path).with_context(|| format!("{}", path.display()))?
                    };
                    if !history.is_empty() {
                        info!("resuming from {} logged trials", history.len());
                    }
                    let mut writer = TrialLogWriter::open(path, fresh)?;
                    optimizer
                        .resume(&score, history, |t| writer.append(t))
                        .with_context(|| format!("{}", path.display()))?
                }
                None => optimizer.run(&score)?,
            };
            let (weights, threshold) = outcome.best.params.split_at(sets.len());
            let best = serde_json::json!({
                "trial": outcome.best.index,
                "trials": outcome.history.len(),
                "weights": weights,
                "threshold": threshold[0],
                "objective": outcome.best.objective,
            });
            let text = serde_json::to_string_pretty(&best)?;
            println!("{text}");
            if let Some(path) = best_out {
                write_text(&path, &(text + "\n"))?;
            }
        }
        Command::Pipeline {
            config,
            mode,
            post,
            seed,
            overrides,
            out_dir,
        } => {
            let mut cfg = match &config {
                Some(path) => PipelineConfig::read(path)?,
                None => PipelineConfig::default(),
            };
            for o in &overrides {
                let (key, value) = o
                    .split_once('=')
                    .with_context(|| format!("--set {o:?}: expected KEY=VALUE"))?;
                cfg.set(key.trim(), value.trim()).with_context(|| format!("--set {o:?}"))?;
            }
            if let Some(mode) = mode {
                cfg.mode = mode;
            }
            if let Some(post) = post {
                cfg.post = post.is_on();
            }
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if let Some(format) = io.format {
                cfg.format = format;
            }
            let artifacts = run_to_dir(&cfg, &out_dir)?;
            print!("{}", artifacts.report.table());
            println!("wrote {} files to {}", artifacts.files.len(), out_dir.display());
        }
    }
    Ok(())
}
