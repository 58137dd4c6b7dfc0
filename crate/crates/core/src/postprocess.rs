//! Span clean-up applied to ensemble output: leading hashtag removal and
//! edge trimming. Both only ever shrink spans.

use std::collections::BTreeSet;

use crate::corpus::{CorpusError, Dataset, Span, Tweet};

/// Characters that may be trimmed from span edges.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Charset {
    /// Every character that is not alphanumeric.
    #[default]
    NonAlphanumeric,
    Only(BTreeSet<char>),
}

impl Charset {
    pub fn contains(&self, c: char) -> bool {
        match self {
            Charset::NonAlphanumeric => !c.is_alphanumeric(),
            Charset::Only(set) => set.contains(&c),
        }
    }
}

impl FromIterator<char> for Charset {
    fn from_iter<I: IntoIterator<Item = char>>(iter: I) -> Self {
        Charset::Only(iter.into_iter().collect())
    }
}

fn rebuild(chars: &[char], start: usize, end: usize, original: &Span) -> Option<Span> {
    if start >= end {
        return None;
    }
    let surface = original.surface.as_ref().map(|_| chars[start..end].iter().collect::<String>());
    Some(Span { start, end, surface })
}

/// Drops leading `#` characters from every span; spans left empty vanish.
pub fn strip_hashtags(text: &str, spans: &[Span]) -> Vec<Span> {
    let chars: Vec<char> = text.chars().collect();
    spans
        .iter()
        .filter_map(|span| {
            let mut start = span.start;
            while start < span.end && chars[start] == '#' {
                start += 1;
            }
            rebuild(&chars, start, span.end, span)
        })
        .collect()
}

/// Removes characters in `charset` from both ends of every span, leaving
/// interior characters alone; spans left empty vanish.
pub fn trim_edges(text: &str, spans: &[Span], charset: &Charset) -> Vec<Span> {
    let chars: Vec<char> = text.chars().collect();
    spans
        .iter()
        .filter_map(|span| {
            let (mut start, mut end) = (span.start, span.end);
            while start < end && charset.contains(chars[start]) {
                start += 1;
            }
            while end > start && charset.contains(chars[end - 1]) {
                end -= 1;
            }
            rebuild(&chars, start, end, span)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PostConfig {
    pub strip_hashtags: bool,
    pub trim: Option<Charset>,
}

impl PostConfig {
    pub fn off() -> Self {
        PostConfig {
            strip_hashtags: false,
            trim: None,
        }
    }
}

impl Default for PostConfig {
    fn default() -> Self {
        PostConfig {
            strip_hashtags: true,
            trim: Some(Charset::default()),
        }
    }
}

pub fn postprocess_tweet(tweet: &Tweet, cfg: &PostConfig) -> Result<Tweet, CorpusError> {
    let mut spans = tweet.spans().to_vec();
    if cfg.strip_hashtags {
        spans = strip_hashtags(tweet.text(), &spans);
    }
    if let Some(charset) = &cfg.trim {
        spans = trim_edges(tweet.text(), &spans, charset);
    }
    tweet.with_spans(spans)
}

/// Post-processes every tweet's spans in a prediction dataset.
pub fn postprocess(predictions: &Dataset, cfg: &PostConfig) -> Result<Dataset, CorpusError> {
    let tweets = predictions
        .tweets()
        .map(|t| postprocess_tweet(t, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    Dataset::new(predictions.name(), tweets)
}
