//! Annotated tweet corpora: spans, tweets, datasets, file formats and
//! stratified splitting.
//!
//! Offsets everywhere count Unicode scalar values (`char`s), never bytes.

mod io;
mod split;

use std::collections::HashSet;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use io::{parse_dataset, read_dataset, serialize_dataset, write_dataset, Format};
pub use split::stratified_split;
pub(crate) use split::round_half_up;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CorpusError {
    #[error("empty span [{start},{end})")]
    EmptySpan { start: usize, end: usize },
    #[error("span out of bounds: [{start},{end}) on text of {len} chars")]
    SpanOutOfBounds { start: usize, end: usize, len: usize },
    #[error("surface mismatch: annotation says {given:?} but text has {actual:?}")]
    SurfaceMismatch { given: String, actual: String },
    #[error("overlapping spans [{}, {}) and [{}, {})", .first.0, .first.1, .second.0, .second.1)]
    OverlappingSpans {
        first: (usize, usize),
        second: (usize, usize),
    },
    #[error("duplicate tweet id {0:?}")]
    DuplicateId(String),
    #[error("split ratio {0} outside (0, 1)")]
    InvalidRatio(f64),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("malformed record: {0}")]
    Malformed(String),
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<CorpusError>,
    },
    #[error("i/o error: {0}")]
    Io(String),
}

impl CorpusError {
    pub(crate) fn at_line(self, line: usize) -> Self {
        CorpusError::AtLine {
            line,
            source: Box::new(self),
        }
    }

    /// Line number for errors raised while parsing a file.
    pub fn line(&self) -> Option<usize> {
        match self {
            CorpusError::AtLine { line, .. } => Some(*line),
            _ => None,
        }
    }
}

impl From<std::io::Error> for CorpusError {
    fn from(e: std::io::Error) -> Self {
        CorpusError::Io(e.to_string())
    }
}

/// Number of Unicode scalar values in `text`.
pub fn char_len(text: &str) -> usize {
    text.chars().count()
}

/// Slice `text` by character offsets. Returns `None` when out of range.
pub fn slice_chars(text: &str, start: usize, end: usize) -> Option<&str> {
    if start > end {
        return None;
    }
    let mut indices = text.char_indices().map(|(b, _)| b).chain(Some(text.len()));
    let b_start = indices.nth(start)?;
    let b_end = if end == start {
        b_start
    } else {
        indices.nth(end - start - 1)?
    };
    Some(&text[b_start..b_end])
}

/// Half-open character interval `[start, end)`, optionally carrying the
/// annotated surface text.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface: Option<String>,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Result<Self, CorpusError> {
        if start >= end {
            return Err(CorpusError::EmptySpan { start, end });
        }
        Ok(Span {
            start,
            end,
            surface: None,
        })
    }

    pub fn with_surface(start: usize, end: usize, surface: impl Into<String>) -> Result<Self, CorpusError> {
        let mut span = Span::new(start, end)?;
        span.surface = Some(surface.into());
        Ok(span)
    }

    /// Span over `text` with its surface filled in from the text.
    pub fn from_text(text: &str, start: usize, end: usize) -> Result<Self, CorpusError> {
        let len = char_len(text);
        if end > len {
            return Err(CorpusError::SpanOutOfBounds { start, end, len });
        }
        let surface = slice_chars(text, start, end).unwrap_or_default();
        Span::with_surface(start, end, surface)
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start >= self.end
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start < other.end && other.start < self.end
    }

    pub fn same_extent(&self, other: &Span) -> bool {
        self.start == other.start && self.end == other.end
    }

    pub fn shifted(&self, delta: isize) -> Span {
        Span {
            start: (self.start as isize + delta) as usize,
            end: (self.end as isize + delta) as usize,
            surface: self.surface.clone(),
        }
    }
}

/// Sort spans and check them against a text of `len` chars: nonempty, in
/// bounds, pairwise disjoint.
pub fn validate_spans(text: &str, spans: &mut [Span]) -> Result<(), CorpusError> {
    let len = char_len(text);
    spans.sort_by_key(|a| (a.start, a.end));
    for span in spans.iter() {
        if span.start >= span.end {
            return Err(CorpusError::EmptySpan {
                start: span.start,
                end: span.end,
            });
        }
        if span.end > len {
            return Err(CorpusError::SpanOutOfBounds {
                start: span.start,
                end: span.end,
                len,
            });
        }
        if let Some(given) = &span.surface {
            let actual = slice_chars(text, span.start, span.end).unwrap_or_default();
            if given != actual {
                return Err(CorpusError::SurfaceMismatch {
                    given: given.clone(),
                    actual: actual.to_string(),
                });
            }
        }
    }
    for pair in spans.windows(2) {
        if pair[1].start < pair[0].end {
            return Err(CorpusError::OverlappingSpans {
                first: (pair[0].start, pair[0].end),
                second: (pair[1].start, pair[1].end),
            });
        }
    }
    Ok(())
}

/// One tweet with its gold annotations. Spans are kept sorted and disjoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tweet {
    id: String,
    user_id: String,
    text: String,
    spans: Vec<Span>,
    len: usize,
}

impl Tweet {
    pub fn new(
        id: impl Into<String>,
        user_id: impl Into<String>,
        text: impl Into<String>,
        mut spans: Vec<Span>,
    ) -> Result<Self, CorpusError> {
        let text = text.into();
        validate_spans(&text, &mut spans)?;
        let len = char_len(&text);
        Ok(Tweet {
            id: id.into(),
            user_id: user_id.into(),
            text,
            spans,
            len,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn user_id(&self) -> &str {
        &self.user_id
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn spans(&self) -> &[Span] {
        &self.spans
    }

    /// Text length in characters.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_positive(&self) -> bool {
        !self.spans.is_empty()
    }

    /// Surface of a span, read from the text.
    pub fn surface(&self, span: &Span) -> &str {
        slice_chars(&self.text, span.start, span.end).unwrap_or_default()
    }

    pub fn with_id(&self, id: impl Into<String>) -> Tweet {
        Tweet {
            id: id.into(),
            ..self.clone()
        }
    }

    /// Same tweet with a different annotation set.
    pub fn with_spans(&self, spans: Vec<Span>) -> Result<Tweet, CorpusError> {
        Tweet::new(self.id.clone(), self.user_id.clone(), self.text.clone(), spans)
    }
}

/// Ordered collection of tweets with unique ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    name: String,
    tweets: IndexMap<String, Tweet>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, tweets: Vec<Tweet>) -> Result<Self, CorpusError> {
        let mut map = IndexMap::with_capacity(tweets.len());
        for tweet in tweets {
            if map.contains_key(tweet.id()) {
                return Err(CorpusError::DuplicateId(tweet.id().to_string()));
            }
            map.insert(tweet.id().to_string(), tweet);
        }
        Ok(Dataset {
            name: name.into(),
            tweets: map,
        })
    }

    pub fn empty(name: impl Into<String>) -> Self {
        Dataset {
            name: name.into(),
            tweets: IndexMap::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn len(&self) -> usize {
        self.tweets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tweets.is_empty()
    }

    pub fn tweets(&self) -> impl ExactSizeIterator<Item = &Tweet> + Clone {
        self.tweets.values()
    }

    pub fn get(&self, id: &str) -> Option<&Tweet> {
        self.tweets.get(id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.tweets.contains_key(id)
    }

    pub fn positive_count(&self) -> usize {
        self.tweets().filter(|t| t.is_positive()).count()
    }

    /// Fraction of tweets with at least one span; 0 for an empty dataset.
    pub fn positive_ratio(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.positive_count() as f64 / self.len() as f64
        }
    }

    pub fn span_count(&self) -> usize {
        self.tweets().map(|t| t.spans().len()).sum()
    }

    /// Append a tweet, rejecting duplicate ids.
    pub fn push(&mut self, tweet: Tweet) -> Result<(), CorpusError> {
        if self.tweets.contains_key(tweet.id()) {
            return Err(CorpusError::DuplicateId(tweet.id().to_string()));
        }
        self.tweets.insert(tweet.id().to_string(), tweet);
        Ok(())
    }

    pub fn extend(&mut self, tweets: impl IntoIterator<Item = Tweet>) -> Result<(), CorpusError> {
        for tweet in tweets {
            self.push(tweet)?;
        }
        Ok(())
    }

    pub fn into_tweets(self) -> Vec<Tweet> {
        self.tweets.into_values().collect()
    }

    /// Returns an id derived from `base` that is not yet used here.
    pub(crate) fn fresh_id(&self, base: &str, taken: &HashSet<String>) -> String {
        if !self.contains(base) && !taken.contains(base) {
            return base.to_string();
        }
        (1..)
            .map(|n| format!("{base}.{n}"))
            .find(|candidate| !self.contains(candidate) && !taken.contains(candidate))
            .expect("unbounded search")
    }
}
