use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rxtweet::pipeline::Mode;
use rxtweet::Format;

#[derive(Parser, Debug)]
#[command(name = "rxtweet", version, about = "Medication mention extraction toolkit for tweets")]
pub struct Cli {
    /// Format of written corpus files; by default inferred from the output
    /// extension (.tsv or JSONL). Inputs are always read by extension.
    #[arg(long, global = true, value_parser = parse_format)]
    pub format: Option<Format>,

    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse()
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

impl Switch {
    pub fn is_on(self) -> bool {
        self == Switch::On
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SearchMethod {
    Grid,
    Tpe,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Stratified train/validation split.
    Split {
        input: PathBuf,
        #[arg(long, default_value_t = 0.8)]
        ratio: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        train_out: PathBuf,
        #[arg(long)]
        valid_out: PathBuf,
    },
    /// Augment a training set (pl1: upsampling; pl2: concatenation,
    /// paraphrasing, drug name replacement and upsampling).
    Augment {
        input: PathBuf,
        #[arg(long, value_parser = parse_mode, default_value = "pl2")]
        mode: Mode,
        /// Manual drug list used for replacement, in addition to the
        /// training set's own annotations.
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long, default_value_t = 0.5)]
        target: f64,
        #[arg(long, default_value_t = 20)]
        concat: usize,
        #[arg(long, default_value_t = 1)]
        replacements: usize,
        #[arg(long, default_value = " ")]
        separator: String,
        /// Shell command reading `{"id","text"}` lines and writing
        /// `{"id","paraphrases":[..]}` lines.
        #[arg(long)]
        paraphrase_command: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Bootstrap subsets for ensemble members.
    Subsets {
        input: PathBuf,
        #[arg(short, long, default_value_t = 6)]
        k: usize,
        #[arg(long, default_value_t = 1.0)]
        fraction: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also draw matching validation subsets from this file.
        #[arg(long)]
        validation: Option<PathBuf>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Produce a prediction file with the built-in gazetteer tagger, or
    /// validate and normalize an external model's prediction file.
    Tag {
        dataset: PathBuf,
        /// Build the lexicon from the gold annotations of these files.
        #[arg(long = "lexicon-from", num_args = 1..)]
        lexicon_from: Vec<PathBuf>,
        /// Manual drug list, one name per line.
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long, default_value_t = 0.9)]
        exact_prob: f64,
        #[arg(long, default_value_t = 0.6)]
        fuzzy_prob: f64,
        #[arg(long, default_value_t = 1)]
        max_edit_distance: u8,
        /// External prediction file to check against the dataset instead of tagging.
        #[arg(long, conflicts_with_all = ["lexicon_from", "lexicon"])]
        ingest: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Combine prediction files into spans (weighted average plus threshold).
    Ensemble {
        dataset: PathBuf,
        #[arg(long, num_args = 1.., required = true)]
        predictions: Vec<PathBuf>,
        /// One weight per prediction file; equal weights by default.
        #[arg(long, value_delimiter = ',')]
        weights: Vec<f64>,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        /// Also write the averaged probability tracks.
        #[arg(long)]
        average_out: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Strip leading hashtags and trim non-alphanumeric span edges.
    Post {
        predictions: PathBuf,
        #[arg(long, value_enum, default_value_t = Switch::On)]
        post: Switch,
        /// Trim only these characters instead of every non-alphanumeric one.
        #[arg(long)]
        trim_chars: Option<String>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Strict and overlapping precision, recall and F1.
    Eval {
        gold: PathBuf,
        predicted: PathBuf,
        /// Training files; enables the false negative breakdown.
        #[arg(long, num_args = 1..)]
        train: Vec<PathBuf>,
        /// Write the report as JSON here as well.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Tune ensemble weights and threshold for overlapping F1.
    Optimize {
        gold: PathBuf,
        #[arg(long, num_args = 1.., required = true)]
        predictions: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = SearchMethod::Tpe)]
        method: SearchMethod,
        /// Number of trials; defaults to the full grid or 200 TPE trials.
        #[arg(long)]
        budget: Option<usize>,
        /// Grid points per dimension (one value, or one per dimension).
        #[arg(long, value_delimiter = ',', default_value = "11")]
        resolution: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// JSONL trial log; existing trials are reused as a warm start.
        #[arg(long)]
        log: Option<PathBuf>,
        /// Ignore and overwrite an existing trial log.
        #[arg(long, requires = "log")]
        fresh: bool,
        /// Write the best parameters as JSON here as well.
        #[arg(long)]
        best_out: Option<PathBuf>,
    },
    /// End-to-end run described by a config file.
    Pipeline {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_parser = parse_mode)]
        mode: Option<Mode>,
        #[arg(long, value_enum)]
        post: Option<Switch>,
        #[arg(long)]
        seed: Option<u64>,
        /// Override any config key (`key=value`).
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        #[arg(long)]
        out_dir: PathBuf,
    },
}
