use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rxtweet::corpus::{parse_dataset, Format};
use rxtweet::pipeline::{run, Artifacts, Mode, PipelineConfig};
use rxtweet::tagger::parse_tracks;
use rxtweet::{Dataset, PredictionSet};
use sha2::{Digest, Sha256};

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn pl2_config() -> PipelineConfig {
    PipelineConfig::read(&data_dir().join("pl2.conf")).unwrap()
}

fn run_with_threads(cfg: &PipelineConfig, threads: usize) -> Artifacts {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    pool.install(|| run(cfg).unwrap())
}

fn dataset(artifacts: &Artifacts, path: &str) -> Dataset {
    let bytes = artifacts.get(path).unwrap_or_else(|| panic!("missing {path}"));
    parse_dataset(path, bytes, Format::Jsonl).unwrap_or_else(|e| panic!("{path}: {e}"))
}

fn tracks(artifacts: &Artifacts, path: &str) -> PredictionSet {
    let bytes = artifacts.get(path).unwrap_or_else(|| panic!("missing {path}"));
    parse_tracks(bytes).unwrap_or_else(|e| panic!("{path}: {e}"))
}

#[test]
fn pl2_artifacts_revalidate() {
    let cfg = pl2_config();
    let out = run(&cfg).unwrap();
    let valid = dataset(&out, "valid.jsonl");
    let train = dataset(&out, "train.jsonl");
    let augmented = dataset(&out, "augmented.jsonl");
    assert_eq!(train.len() + valid.len(), 203);
    assert!(augmented.positive_ratio() >= cfg.target_positive_ratio);
    for i in 0..6 {
        let subset = dataset(&out, &format!("subsets/subset{i}.jsonl"));
        assert_eq!(subset.len(), augmented.len());
        tracks(&out, &format!("predictions/model{i}.jsonl")).check_against(&valid).unwrap();
    }
    assert!(out.get("subsets/subset6.jsonl").is_none());
    tracks(&out, "predictions/average.jsonl").check_against(&valid).unwrap();
    for path in ["ensemble.jsonl", "ensemble-post.jsonl"] {
        let predicted = dataset(&out, path);
        let ids: Vec<&str> = predicted.tweets().map(|t| t.id()).collect();
        let expected: Vec<&str> = valid.tweets().map(|t| t.id()).collect();
        assert_eq!(ids, expected, "{path}");
    }
    let names: Vec<&str> = out.report.metrics.iter().map(|r| r.name.as_str()).collect();
    assert_eq!(names.len(), 8);
    assert_eq!(out.report.final_row().name, "ensemble-post");
    for row in &out.report.metrics {
        assert!(row.report.strict.f1 <= row.report.overlapping.f1);
    }
}

#[test]
fn pl2_matches_golden_manifest() {
    let out = run(&pl2_config()).unwrap();
    let golden = std::fs::read_to_string(data_dir().join("golden/pl2/manifest.sha256")).unwrap();
    let expected: BTreeMap<&str, &str> = golden
        .lines()
        .map(|l| {
            let (hash, path) = l.split_once("  ").unwrap();
            (path, hash)
        })
        .collect();
    let actual: BTreeMap<String, String> = out
        .files
        .iter()
        .map(|(p, b)| (p.to_str().unwrap().to_string(), format!("{:x}", Sha256::digest(b))))
        .collect();
    assert_eq!(actual.len(), expected.len());
    for (path, hash) in &actual {
        assert_eq!(expected.get(path.as_str()), Some(&hash.as_str()), "{path}");
    }
    let report = std::fs::read(data_dir().join("golden/pl2/report.json")).unwrap();
    assert_eq!(out.get("report.json"), Some(report.as_slice()));
}

#[test]
fn identical_across_repeats_and_thread_counts() {
    let cfg = pl2_config();
    let one = run_with_threads(&cfg, 1);
    let four = run_with_threads(&cfg, 4);
    let again = run_with_threads(&cfg, 4);
    assert_eq!(one.files, four.files);
    assert_eq!(four.files, again.files);

    let mut pl1 = cfg.clone();
    pl1.mode = Mode::Pl1;
    pl1.models = None;
    let a = run_with_threads(&pl1, 1);
    let b = run_with_threads(&pl1, 3);
    assert_eq!(a.files, b.files);
    assert_eq!(a.report.models, 1);
}

#[test]
fn seed_changes_output() {
    let cfg = pl2_config();
    let mut other = cfg.clone();
    other.seed += 1;
    assert_ne!(run(&cfg).unwrap().files, run(&other).unwrap().files);
}

#[test]
fn post_toggle_changes_only_span_edges() {
    let mut cfg = pl2_config();
    let on = run(&cfg).unwrap();
    cfg.post = false;
    let off = run(&cfg).unwrap();
    assert!(off.get("ensemble-post.jsonl").is_none());
    assert_eq!(on.get("ensemble.jsonl"), off.get("ensemble.jsonl"));
    assert_eq!(off.report.final_row().name, "ensemble");

    let raw = dataset(&on, "ensemble.jsonl");
    let post = dataset(&on, "ensemble-post.jsonl");
    for (r, p) in raw.tweets().zip(post.tweets()) {
        assert_eq!(r.text(), p.text());
        for span in p.spans() {
            assert!(
                r.spans().iter().any(|s| s.start <= span.start && span.end <= s.end),
                "{}: {span:?} not inside a raw span",
                r.id()
            );
        }
    }
}

#[test]
fn tsv_output_round_trips() {
    let mut cfg = pl2_config();
    cfg.format = Format::Tsv;
    let out = run(&cfg).unwrap();
    let bytes = out.get("valid.tsv").unwrap();
    let valid = parse_dataset("valid", bytes, Format::Tsv).unwrap();
    let jsonl = run(&pl2_config()).unwrap();
    let reference = dataset(&jsonl, "valid.jsonl");
    assert_eq!(valid.tweets().collect::<Vec<_>>(), reference.tweets().collect::<Vec<_>>());
}
