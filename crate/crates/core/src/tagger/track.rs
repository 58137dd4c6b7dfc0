//! Run-length encoded per-character probabilities and the prediction file
//! format shared by every model.

use std::fs;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Dataset;
use crate::num::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrackError {
    #[error("run [{start},{end}) of track {id:?} is empty")]
    EmptyRun { id: String, start: usize, end: usize },
    #[error("run [{start},{end}) of track {id:?} exceeds length {length}")]
    RunOutOfBounds {
        id: String,
        start: usize,
        end: usize,
        length: usize,
    },
    #[error("runs of track {id:?} are unsorted or overlap at {at}")]
    Overlap { id: String, at: usize },
    #[error("run [{start},{end}) of track {id:?} has probability {prob} outside (0, 1]")]
    BadProbability {
        id: String,
        start: usize,
        end: usize,
        prob: f64,
    },
    #[error("duplicate track for tweet {0:?}")]
    DuplicateId(String),
    #[error("track for unknown tweet {0:?}")]
    UnknownTweet(String),
    #[error("no track for tweet {0:?}")]
    MissingTweet(String),
    #[error("track {id:?} has length {found}, tweet has {expected} chars")]
    LengthMismatch { id: String, expected: usize, found: usize },
    #[error("malformed prediction record: {0}")]
    Malformed(String),
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<TrackError>,
    },
    #[error("i/o error: {0}")]
    Io(String),
}

impl TrackError {
    fn at_line(self, line: usize) -> Self {
        TrackError::AtLine {
            line,
            source: Box::new(self),
        }
    }
}

/// Run of characters `[start, end)` sharing probability `prob`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "(usize, usize, T)", into = "(usize, usize, T)")]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct Run<T> {
    pub start: usize,
    pub end: usize,
    pub prob: T,
}

impl<T> From<(usize, usize, T)> for Run<T> {
    fn from((start, end, prob): (usize, usize, T)) -> Self {
        Run { start, end, prob }
    }
}

impl<T> From<Run<T>> for (usize, usize, T) {
    fn from(r: Run<T>) -> Self {
        (r.start, r.end, r.prob)
    }
}

/// Probability that each character of one tweet lies inside a drug mention,
/// from one model. Characters outside every run have probability zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct ProbTrack<T> {
    pub tweet_id: String,
    pub length: usize,
    pub runs: Vec<Run<T>>,
}

impl<T: Scalar> ProbTrack<T> {
    /// Checked constructor: runs sorted, disjoint, in bounds, prob in (0, 1].
    pub fn new(tweet_id: impl Into<String>, length: usize, runs: Vec<Run<T>>) -> Result<Self, TrackError> {
        let track = ProbTrack {
            tweet_id: tweet_id.into(),
            length,
            runs,
        };
        track.validate()?;
        Ok(track)
    }

    pub fn empty(tweet_id: impl Into<String>, length: usize) -> Self {
        ProbTrack {
            tweet_id: tweet_id.into(),
            length,
            runs: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), TrackError> {
        let id = || self.tweet_id.clone();
        let mut prev_end = 0;
        for run in &self.runs {
            if run.start >= run.end {
                return Err(TrackError::EmptyRun { id: id(), start: run.start, end: run.end });
            }
            if run.end > self.length {
                return Err(TrackError::RunOutOfBounds {
                    id: id(),
                    start: run.start,
                    end: run.end,
                    length: self.length,
                });
            }
            if run.start < prev_end {
                return Err(TrackError::Overlap { id: id(), at: run.start });
            }
            if !(run.prob > T::zero() && run.prob <= T::one()) {
                return Err(TrackError::BadProbability {
                    id: id(),
                    start: run.start,
                    end: run.end,
                    prob: run.prob.as_f64(),
                });
            }
            prev_end = run.end;
        }
        Ok(())
    }

    /// Encodes a dense per-character vector: equal neighbours merge, zeros
    /// are elided. Values are expected in `[0, 1]`.
    pub fn from_dense(tweet_id: impl Into<String>, probs: &[T]) -> Self {
        let mut runs: Vec<Run<T>> = Vec::new();
        for (i, &p) in probs.iter().enumerate() {
            if p <= T::zero() {
                continue;
            }
            match runs.last_mut() {
                Some(last) if last.end == i && last.prob == p => last.end = i + 1,
                _ => runs.push(Run { start: i, end: i + 1, prob: p }),
            }
        }
        ProbTrack {
            tweet_id: tweet_id.into(),
            length: probs.len(),
            runs,
        }
    }

    pub fn to_dense(&self) -> Vec<T> {
        let mut dense = vec![T::zero(); self.length];
        for run in &self.runs {
            for p in &mut dense[run.start..run.end] {
                *p = run.prob;
            }
        }
        dense
    }

    pub fn prob_at(&self, pos: usize) -> T {
        match self.runs.binary_search_by(|r| {
            if r.end <= pos {
                std::cmp::Ordering::Less
            } else if r.start > pos {
                std::cmp::Ordering::Greater
            } else {
                std::cmp::Ordering::Equal
            }
        }) {
            Ok(i) => self.runs[i].prob,
            Err(_) => T::zero(),
        }
    }

    /// Rounds every probability to 0 or 1 around `cutoff` (inclusive).
    pub fn binarized(&self, cutoff: T) -> Self {
        let dense: Vec<T> = self
            .to_dense()
            .into_iter()
            .map(|p| if p >= cutoff { T::one() } else { T::zero() })
            .collect();
        ProbTrack::from_dense(self.tweet_id.clone(), &dense)
    }
}

/// Tracks for a set of tweets from one model, in dataset order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrackSet<T> {
    tracks: IndexMap<String, ProbTrack<T>>,
}

impl<T: Scalar> TrackSet<T> {
    pub fn new() -> Self {
        TrackSet { tracks: IndexMap::new() }
    }

    pub fn from_tracks(tracks: impl IntoIterator<Item = ProbTrack<T>>) -> Result<Self, TrackError> {
        let mut set = TrackSet::new();
        for track in tracks {
            set.insert(track)?;
        }
        Ok(set)
    }

    pub fn insert(&mut self, track: ProbTrack<T>) -> Result<(), TrackError> {
        if self.tracks.contains_key(&track.tweet_id) {
            return Err(TrackError::DuplicateId(track.tweet_id));
        }
        self.tracks.insert(track.tweet_id.clone(), track);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&ProbTrack<T>> {
        self.tracks.get(id)
    }

    pub fn len(&self) -> usize {
        self.tracks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tracks.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &ProbTrack<T>> {
        self.tracks.values()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.tracks.keys().map(String::as_str)
    }

    /// Checks that the set covers exactly the tweets of `dataset` with
    /// matching lengths.
    pub fn check_against(&self, dataset: &Dataset) -> Result<(), TrackError> {
        for track in self.iter() {
            let tweet = dataset
                .get(&track.tweet_id)
                .ok_or_else(|| TrackError::UnknownTweet(track.tweet_id.clone()))?;
            if tweet.len() != track.length {
                return Err(TrackError::LengthMismatch {
                    id: track.tweet_id.clone(),
                    expected: tweet.len(),
                    found: track.length,
                });
            }
        }
        if let Some(missing) = dataset.tweets().find(|t| !self.tracks.contains_key(t.id())) {
            return Err(TrackError::MissingTweet(missing.id().to_string()));
        }
        Ok(())
    }

    /// Same tracks, reordered to follow `dataset`. Call after
    /// [`check_against`](Self::check_against).
    pub fn ordered_like(mut self, dataset: &Dataset) -> Self {
        let mut tracks = IndexMap::with_capacity(self.tracks.len());
        for tweet in dataset.tweets() {
            if let Some(track) = self.tracks.swap_remove(tweet.id()) {
                tracks.insert(tweet.id().to_string(), track);
            }
        }
        tracks.extend(self.tracks);
        TrackSet { tracks }
    }
}

/// One JSON object per line: `{"tweet_id", "length", "runs": [[s, e, p], ..]}`.
pub fn serialize_tracks<T: Scalar>(set: &TrackSet<T>) -> Vec<u8> {
    let mut out = Vec::new();
    for track in set.iter() {
        serde_json::to_writer(&mut out, track).expect("serializing to memory");
        out.push(b'\n');
    }
    out
}

pub fn parse_tracks<T: Scalar>(input: impl Read) -> Result<TrackSet<T>, TrackError> {
    let mut set = TrackSet::new();
    for (idx, line) in BufReader::new(input).lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| TrackError::Malformed(e.to_string()).at_line(lineno))?;
        if line.trim().is_empty() {
            continue;
        }
        let track: ProbTrack<T> =
            serde_json::from_str(&line).map_err(|e| TrackError::Malformed(e.to_string()).at_line(lineno))?;
        track.validate().map_err(|e| e.at_line(lineno))?;
        set.insert(track).map_err(|e| e.at_line(lineno))?;
    }
    Ok(set)
}

pub fn read_tracks<T: Scalar>(path: &Path) -> Result<TrackSet<T>, TrackError> {
    let file = fs::File::open(path).map_err(|e| TrackError::Io(format!("{}: {e}", path.display())))?;
    parse_tracks(file)
}

pub fn write_tracks<T: Scalar>(path: &Path, set: &TrackSet<T>) -> Result<(), TrackError> {
    fs::write(path, serialize_tracks(set)).map_err(|e| TrackError::Io(format!("{}: {e}", path.display())))
}
