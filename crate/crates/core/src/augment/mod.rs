//! Training-set augmentation: upsampling, tweet concatenation, drug name
//! replacement and an external paraphrase hook. Every produced tweet is
//! rebuilt through [`Tweet::new`], so span bookkeeping errors surface as
//! corpus errors instead of silently corrupt data.

mod paraphrase;

use std::collections::{HashMap, HashSet};

use log::warn;
use rand::Rng;
use thiserror::Error;

use crate::corpus::{char_len, CorpusError, Dataset, Span, Tweet};
use crate::lexicon::Lexicon;
use crate::rng::{keyed_stream, StreamRng};

pub use paraphrase::{paraphrase, Paraphrased};

#[derive(Debug, Error)]
pub enum AugmentError {
    #[error("dataset has no positive tweets to augment")]
    NoPositives,
    #[error("need at least 2 positive tweets, found {0}")]
    TooFewPositives(usize),
    #[error("target positive ratio {0} outside (0, 1)")]
    InvalidTarget(f64),
    #[error("replacement lexicon is empty")]
    EmptyLexicon,
    #[error("tweet {0:?} has no annotations to replace")]
    NoAnnotations(String),
    #[error("paraphrase command could not be started: {0}")]
    CommandLaunch(String),
    #[error("paraphrase command failed with {status}: {stderr}")]
    CommandFailed { status: String, stderr: String },
    #[error("paraphrase output line {line}: {message}")]
    MalformedOutput { line: usize, message: String },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AugmentConfig {
    pub target_positive_ratio: f64,
    pub concat_pairs: usize,
    pub replacement_per_positive: usize,
    pub separator: String,
    pub seed: u64,
    /// Shell command line run through `sh -c`.
    pub paraphrase_command: Option<String>,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        AugmentConfig {
            target_positive_ratio: 0.5,
            concat_pairs: 20,
            replacement_per_positive: 1,
            separator: " ".to_string(),
            seed: 0,
            paraphrase_command: None,
        }
    }
}

/// Result of [`upsample`]. `added == 0` with `already_balanced` set means the
/// input already met the target and was returned unchanged.
#[derive(Debug, Clone)]
pub struct Upsampled {
    pub dataset: Dataset,
    pub added: usize,
    pub already_balanced: bool,
}

/// Smallest number of extra positives `m` with `(p + m) / (n + m) >= target`.
pub fn required_duplicates(positives: usize, total: usize, target: f64) -> usize {
    let reaches = |m: usize| (positives + m) as f64 >= target * (total + m) as f64;
    let estimate = ((target * total as f64 - positives as f64) / (1.0 - target)).ceil().max(0.0) as usize;
    let mut m = estimate;
    while m > 0 && reaches(m - 1) {
        m -= 1;
    }
    while !reaches(m) {
        m += 1;
    }
    m
}

/// Duplicates positive tweets (drawn with replacement) until the positive
/// ratio reaches `target`. Copies get ids `<id>#dup<k>` and are appended.
pub fn upsample(dataset: &Dataset, target: f64, seed: u64) -> Result<Upsampled, AugmentError> {
    if !(target > 0.0 && target < 1.0) {
        return Err(AugmentError::InvalidTarget(target));
    }
    let positives: Vec<&Tweet> = dataset.tweets().filter(|t| t.is_positive()).collect();
    if positives.is_empty() {
        return Err(AugmentError::NoPositives);
    }
    if dataset.positive_ratio() >= target {
        warn!(
            "{}: positive ratio {:.4} already meets target {target}; dataset unchanged",
            dataset.name(),
            dataset.positive_ratio()
        );
        return Ok(Upsampled {
            dataset: dataset.clone(),
            added: 0,
            already_balanced: true,
        });
    }

    let needed = required_duplicates(positives.len(), dataset.len(), target);
    let mut rng = keyed_stream(seed, "upsample", dataset.name());
    let mut copies: HashMap<&str, usize> = HashMap::new();
    let mut taken = HashSet::new();
    let mut out = dataset.clone();
    for _ in 0..needed {
        let original = positives[rng.random_range(0..positives.len())];
        let k = copies.entry(original.id()).or_insert(0);
        *k += 1;
        let id = dataset.fresh_id(&format!("{}#dup{k}", original.id()), &taken);
        taken.insert(id.clone());
        out.push(original.with_id(id))?;
    }
    Ok(Upsampled {
        dataset: out,
        added: needed,
        already_balanced: false,
    })
}

/// Joins `a` and `b` with `separator`, shifting `b`'s spans.
pub fn concat_tweets(a: &Tweet, b: &Tweet, separator: &str, id: String) -> Result<Tweet, CorpusError> {
    let shift = (a.len() + char_len(separator)) as isize;
    let text = format!("{}{separator}{}", a.text(), b.text());
    let spans = a
        .spans()
        .iter()
        .cloned()
        .chain(b.spans().iter().map(|s| s.shifted(shift)))
        .collect();
    Tweet::new(id, a.user_id(), text, spans)
}

/// Builds `n` tweets, each the concatenation of an ordered pair of distinct
/// positive tweets chosen uniformly. Pair `i` draws from its own stream, and
/// gets id `<a>+<b>#cat<i>`.
pub fn concat_pairs(dataset: &Dataset, n: usize, separator: &str, seed: u64) -> Result<Vec<Tweet>, AugmentError> {
    let positives: Vec<&Tweet> = dataset.tweets().filter(|t| t.is_positive()).collect();
    if positives.len() < 2 {
        return Err(AugmentError::TooFewPositives(positives.len()));
    }
    (0..n)
        .map(|i| {
            let mut rng = keyed_stream(seed, "concat", &i.to_string());
            let first = rng.random_range(0..positives.len());
            let mut second = rng.random_range(0..positives.len() - 1);
            if second >= first {
                second += 1;
            }
            let (a, b) = (positives[first], positives[second]);
            let id = format!("{}+{}#cat{i}", a.id(), b.id());
            concat_tweets(a, b, separator, id).map_err(AugmentError::from)
        })
        .collect()
}

/// Replaces every gold mention in `tweet` with a lexicon entry that differs
/// (case-insensitively) from the original, shifting later spans by the
/// accumulated length change. Mentions with no distinct candidate are kept.
/// The random stream is keyed by the tweet id.
pub fn replace_drug_names(tweet: &Tweet, lexicon: &Lexicon, seed: u64) -> Result<Tweet, AugmentError> {
    if lexicon.is_empty() {
        return Err(AugmentError::EmptyLexicon);
    }
    if !tweet.is_positive() {
        return Err(AugmentError::NoAnnotations(tweet.id().to_string()));
    }
    let mut rng = keyed_stream(seed, "replace", tweet.id());
    Ok(replace_with(tweet, lexicon, &mut rng)?)
}

fn replace_with(tweet: &Tweet, lexicon: &Lexicon, rng: &mut StreamRng) -> Result<Tweet, CorpusError> {
    let chars: Vec<char> = tweet.text().chars().collect();
    let mut text = String::with_capacity(tweet.text().len());
    let mut spans = Vec::with_capacity(tweet.spans().len());
    let mut cursor = 0;
    let mut new_len = 0;
    for span in tweet.spans() {
        text.extend(&chars[cursor..span.start]);
        new_len += span.start - cursor;
        let original: String = chars[span.start..span.end].iter().collect();
        let folded = original.to_lowercase();
        let candidates: Vec<&str> = lexicon.entries().filter(|e| e.to_lowercase() != folded).collect();
        let replacement = if candidates.is_empty() {
            original.as_str()
        } else {
            candidates[rng.random_range(0..candidates.len())]
        };
        let start = new_len;
        text.push_str(replacement);
        new_len += char_len(replacement);
        spans.push(Span::with_surface(start, new_len, replacement)?);
        cursor = span.end;
    }
    text.extend(&chars[cursor..]);
    Tweet::new(tweet.id(), tweet.user_id(), text, spans)
}

/// Summary of what an augmentation run produced.
#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize)]
pub struct AugmentStats {
    pub concatenated: usize,
    pub paraphrased: usize,
    pub paraphrases_dropped: usize,
    pub replaced: usize,
    pub upsampled: usize,
}

/// Upsampling only.
pub fn augment_pl1(train: &Dataset, cfg: &AugmentConfig) -> Result<(Dataset, AugmentStats), AugmentError> {
    let up = upsample(train, cfg.target_positive_ratio, cfg.seed)?;
    let stats = AugmentStats {
        upsampled: up.added,
        ..Default::default()
    };
    Ok((up.dataset, stats))
}

/// Concatenation, paraphrasing (when a command is configured), drug name
/// replacement and finally upsampling. The first three operate on the
/// original positive tweets; upsampling runs over the enlarged set.
pub fn augment_pl2(
    train: &Dataset,
    lexicon: &Lexicon,
    cfg: &AugmentConfig,
) -> Result<(Dataset, AugmentStats), AugmentError> {
    let mut stats = AugmentStats::default();
    let mut out = train.clone();

    let concatenated = concat_pairs(train, cfg.concat_pairs, &cfg.separator, cfg.seed)?;
    stats.concatenated = concatenated.len();
    out.extend(concatenated)?;

    if let Some(command) = &cfg.paraphrase_command {
        let para = paraphrase(train, command)?;
        stats.paraphrased = para.tweets.len();
        stats.paraphrases_dropped = para.dropped;
        out.extend(para.tweets)?;
    }

    let positives: Vec<&Tweet> = train.tweets().filter(|t| t.is_positive()).collect();
    for tweet in &positives {
        for j in 0..cfg.replacement_per_positive {
            let renamed = tweet.with_id(format!("{}#rep{j}", tweet.id()));
            let replaced = replace_drug_names(&renamed, lexicon, cfg.seed)?;
            out.push(replaced)?;
            stats.replaced += 1;
        }
    }

    let up = upsample(&out, cfg.target_positive_ratio, cfg.seed)?;
    stats.upsampled = up.added;
    Ok((up.dataset, stats))
}
