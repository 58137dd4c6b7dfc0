//! Drug-name lexicons with provenance tags.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::corpus::Dataset;

#[derive(Debug, Error, PartialEq)]
pub enum LexiconError {
    #[error("i/o error: {0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Source {
    /// Surface seen as a gold annotation in a training corpus.
    Corpus,
    /// Entry from a manually compiled list.
    Manual,
}

/// Set of drug names, case preserved, iterated in sorted order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: BTreeMap<String, BTreeSet<Source>>,
}

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an entry. Blank names are ignored and reported as `false`.
    pub fn insert(&mut self, name: &str, source: Source) -> bool {
        let name = name.trim();
        if name.is_empty() {
            return false;
        }
        self.entries.entry(name.to_string()).or_default().insert(source);
        true
    }

    /// All gold surfaces of `dataset`, tagged [`Source::Corpus`].
    pub fn from_dataset(dataset: &Dataset) -> Self {
        let mut lex = Lexicon::new();
        lex.add_dataset(dataset);
        lex
    }

    pub fn add_dataset(&mut self, dataset: &Dataset) {
        for tweet in dataset.tweets() {
            for span in tweet.spans() {
                self.insert(tweet.surface(span), Source::Corpus);
            }
        }
    }

    /// Parses a manual list: one name per line, `#` comment lines and blank
    /// lines skipped.
    pub fn parse_manual(text: &str) -> Self {
        let mut lex = Lexicon::new();
        for line in text.lines() {
            let trimmed = line.trim();
            if !trimmed.starts_with('#') {
                lex.insert(trimmed, Source::Manual);
            }
        }
        lex
    }

    pub fn read_manual(path: &Path) -> Result<Self, LexiconError> {
        let text = fs::read_to_string(path).map_err(|e| LexiconError::Io(format!("{}: {e}", path.display())))?;
        Ok(Self::parse_manual(&text))
    }

    pub fn merge(&mut self, other: &Lexicon) {
        for (name, sources) in &other.entries {
            self.entries.entry(name.clone()).or_default().extend(sources.iter().copied());
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn sources(&self, name: &str) -> Option<&BTreeSet<Source>> {
        self.entries.get(name)
    }

    pub fn entries(&self) -> impl ExactSizeIterator<Item = &str> + Clone {
        self.entries.keys().map(String::as_str)
    }
}

impl<'a> FromIterator<&'a str> for Lexicon {
    fn from_iter<I: IntoIterator<Item = &'a str>>(iter: I) -> Self {
        let mut lex = Lexicon::new();
        for name in iter {
            lex.insert(name, Source::Manual);
        }
        lex
    }
}
