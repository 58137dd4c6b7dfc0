use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::corpus::Format;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("{path}:{line}: {message}")]
    AtLine { path: String, line: usize, message: String },
    #[error("key {key:?}: {message}")]
    BadValue { key: String, message: String },
    #[error("unknown key {0:?}")]
    UnknownKey(String),
    #[error("required key {0:?} is not set")]
    Missing(&'static str),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Upsampling, one tagger.
    Pl1,
    /// All augmentations, bagged ensemble.
    #[default]
    Pl2,
}

impl Mode {
    pub fn default_models(self) -> usize {
        match self {
            Mode::Pl1 => 1,
            Mode::Pl2 => 6,
        }
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "pl1" => Ok(Mode::Pl1),
            "pl2" => Ok(Mode::Pl2),
            other => Err(format!("unknown mode {other:?} (expected pl1 or pl2)")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Pl1 => "pl1",
            Mode::Pl2 => "pl2",
        })
    }
}

/// Settings for an end-to-end run.
///
/// The text form is one `key = value` pair per line; `#` starts a comment
/// line. Values may be written as JSON strings (`separator = " | "`) when
/// surrounding whitespace matters. Relative paths resolve against the
/// directory of the config file.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub mode: Mode,
    pub seed: u64,
    pub corpus: Option<PathBuf>,
    /// Separate validation corpus; when absent the corpus is split.
    pub validation: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub train_ratio: f64,
    /// Ensemble size; defaults per mode when unset.
    pub models: Option<usize>,
    pub sample_fraction: f64,
    pub target_positive_ratio: f64,
    pub concat_pairs: usize,
    pub replacements: usize,
    pub separator: String,
    pub paraphrase_command: Option<String>,
    pub exact_prob: f64,
    pub fuzzy_prob: f64,
    pub max_edit_distance: u8,
    pub threshold: f64,
    pub post: bool,
    pub format: Format,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            mode: Mode::Pl2,
            seed: 0,
            corpus: None,
            validation: None,
            lexicon: None,
            train_ratio: 0.8,
            models: None,
            sample_fraction: 1.0,
            target_positive_ratio: 0.5,
            concat_pairs: 20,
            replacements: 1,
            separator: " ".to_string(),
            paraphrase_command: None,
            exact_prob: 0.9,
            fuzzy_prob: 0.6,
            max_edit_distance: 1,
            threshold: 0.5,
            post: true,
            format: Format::Jsonl,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e: T::Err| ConfigError::BadValue {
        key: key.to_string(),
        message: e.to_string(),
    })
}

fn parse_switch(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value.to_ascii_lowercase().as_str() {
        "on" | "true" | "yes" | "1" => Ok(true),
        "off" | "false" | "no" | "0" => Ok(false),
        _ => Err(ConfigError::BadValue {
            key: key.to_string(),
            message: format!("expected on or off, got {value:?}"),
        }),
    }
}

fn optional(value: &str) -> Option<&str> {
    match value {
        "" | "none" => None,
        v => Some(v),
    }
}

impl PipelineConfig {
    pub const KEYS: &'static [&'static str] = &[
        "mode",
        "seed",
        "corpus",
        "validation",
        "lexicon",
        "train_ratio",
        "models",
        "sample_fraction",
        "target_positive_ratio",
        "concat_pairs",
        "replacements",
        "separator",
        "paraphrase_command",
        "exact_prob",
        "fuzzy_prob",
        "max_edit_distance",
        "threshold",
        "post",
        "format",
    ];

    /// Applies one setting. Paths are taken as given.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "mode" => self.mode = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "corpus" => self.corpus = optional(value).map(PathBuf::from),
            "validation" => self.validation = optional(value).map(PathBuf::from),
            "lexicon" => self.lexicon = optional(value).map(PathBuf::from),
            "train_ratio" => self.train_ratio = parse(key, value)?,
            "models" => self.models = optional(value).map(|v| parse(key, v)).transpose()?,
            "sample_fraction" => self.sample_fraction = parse(key, value)?,
            "target_positive_ratio" => self.target_positive_ratio = parse(key, value)?,
            "concat_pairs" => self.concat_pairs = parse(key, value)?,
            "replacements" => self.replacements = parse(key, value)?,
            "separator" => self.separator = value.to_string(),
            "paraphrase_command" => self.paraphrase_command = optional(value).map(str::to_string),
            "exact_prob" => self.exact_prob = parse(key, value)?,
            "fuzzy_prob" => self.fuzzy_prob = parse(key, value)?,
            "max_edit_distance" => self.max_edit_distance = parse(key, value)?,
            "threshold" => self.threshold = parse(key, value)?,
            "post" => self.post = parse_switch(key, value)?,
            "format" => self.format = parse(key, value)?,
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    /// Parses the text form on top of the defaults. `origin` names the source
    /// in error messages; `base` anchors relative paths.
    pub fn parse(text: &str, origin: &str, base: Option<&Path>) -> Result<Self, ConfigError> {
        let mut cfg = PipelineConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let at = |message: String| ConfigError::AtLine {
                path: origin.to_string(),
                line: i + 1,
                message,
            };
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| at(format!("expected key = value, got {line:?}")))?;
            let key = key.trim();
            let mut value = value.trim().to_string();
            if value.starts_with('"') {
                value = serde_json::from_str(&value).map_err(|e| at(format!("bad quoted value: {e}")))?;
            }
            cfg.set(key, &value).map_err(|e| at(e.to_string()))?;
        }
        if let Some(base) = base {
            for path in [&mut cfg.corpus, &mut cfg.validation, &mut cfg.lexicon].into_iter().flatten() {
                if path.is_relative() {
                    *path = base.join(&*path);
                }
            }
        }
        Ok(cfg)
    }

    pub fn read(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text, &path.display().to_string(), path.parent())
    }

    pub fn models(&self) -> usize {
        self.models.unwrap_or_else(|| self.mode.default_models())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |key: &str, message: String| {
            Err(ConfigError::BadValue {
                key: key.to_string(),
                message,
            })
        };
        if self.corpus.is_none() {
            return Err(ConfigError::Missing("corpus"));
        }
        if self.validation.is_none() && !(self.train_ratio > 0.0 && self.train_ratio < 1.0) {
            return bad("train_ratio", format!("{} outside (0, 1)", self.train_ratio));
        }
        if self.models() == 0 {
            return bad("models", "must be at least 1".to_string());
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return bad("threshold", format!("{} outside (0, 1)", self.threshold));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_comments_and_quotes() {
        let text = "# demo\nmode = pl1\nseed=7\n\nseparator = \" | \"\npost = off\nmodels = 3\ncorpus = data/x.jsonl\n";
        let cfg = PipelineConfig::parse(text, "demo.conf", Some(Path::new("/base"))).unwrap();
        assert_eq!(cfg.mode, Mode::Pl1);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.separator, " | ");
        assert!(!cfg.post);
        assert_eq!(cfg.models(), 3);
        assert_eq!(cfg.corpus.as_deref(), Some(Path::new("/base/data/x.jsonl")));
    }

    #[test]
    fn errors_name_the_line() {
        let err = PipelineConfig::parse("seed = 1\nthreshold = high\n", "c.conf", None).unwrap_err();
        match err {
            ConfigError::AtLine { path, line, message } => {
                assert_eq!((path.as_str(), line), ("c.conf", 2));
                assert!(message.contains("threshold"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            PipelineConfig::parse("colour = red", "c", None),
            Err(ConfigError::AtLine { line: 1, .. })
        ));
        assert!(matches!(
            PipelineConfig::parse("no equals sign", "c", None),
            Err(ConfigError::AtLine { line: 1, .. })
        ));
    }

    #[test]
    fn mode_sets_default_ensemble_size() {
        let mut cfg = PipelineConfig::default();
        assert_eq!(cfg.models(), 6);
        cfg.set("mode", "PL1").unwrap();
        assert_eq!(cfg.models(), 1);
        assert_eq!(cfg.validate(), Err(ConfigError::Missing("corpus")));
    }
}
