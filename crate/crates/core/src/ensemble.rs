//! Character-level ensembling of per-model probability tracks.
//!
//! Both operations work on segment boundaries of the run-length encoding,
//! so cost scales with the number of runs rather than tweet length.

use rayon::prelude::*;
use thiserror::Error;

use crate::corpus::{CorpusError, Dataset, Span, Tweet};
use crate::num::Scalar;
use crate::tagger::{ProbTrack, Run, TrackError, TrackSet};

#[derive(Debug, Error, PartialEq)]
pub enum EnsembleError {
    #[error("no weights given")]
    NoWeights,
    #[error("weight {0} is negative or not finite")]
    BadWeight(f64),
    #[error("weights sum to zero")]
    ZeroWeights,
    #[error("threshold {0} outside (0, 1)")]
    BadThreshold(f64),
    #[error("{tracks} tracks but {weights} weights")]
    CountMismatch { tracks: usize, weights: usize },
    #[error("tracks for tweet {id:?} disagree on length ({first} vs {other})")]
    LengthMismatch { id: String, first: usize, other: usize },
    #[error("nothing to average")]
    NoModels,
    #[error(transparent)]
    Track(#[from] TrackError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

/// Per-model weights and the inclusion threshold. Weights are normalized to
/// sum to one before use, so any positive rescaling is equivalent.
#[derive(Debug, Clone, PartialEq)]
pub struct Params<T> {
    weights: Vec<T>,
    threshold: T,
}

impl<T: Scalar> Params<T> {
    pub fn new(weights: Vec<T>, threshold: T) -> Result<Self, EnsembleError> {
        if weights.is_empty() {
            return Err(EnsembleError::NoWeights);
        }
        if let Some(bad) = weights.iter().find(|w| !(w.is_finite() && **w >= T::zero())) {
            return Err(EnsembleError::BadWeight(bad.as_f64()));
        }
        if weights.iter().copied().sum::<T>() <= T::zero() {
            return Err(EnsembleError::ZeroWeights);
        }
        if !(threshold > T::zero() && threshold < T::one()) {
            return Err(EnsembleError::BadThreshold(threshold.as_f64()));
        }
        Ok(Params { weights, threshold })
    }

    /// `k` equal weights.
    pub fn equal(k: usize, threshold: T) -> Result<Self, EnsembleError> {
        Params::new(vec![T::one(); k], threshold)
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn threshold(&self) -> T {
        self.threshold
    }

    pub fn normalized_weights(&self) -> Vec<T> {
        let total: T = self.weights.iter().copied().sum();
        self.weights.iter().map(|&w| w / total).collect()
    }
}

/// Sorted distinct run boundaries of `tracks`, always including 0 and `len`.
fn breakpoints<T>(tracks: &[&ProbTrack<T>], len: usize) -> Vec<usize> {
    let mut points: Vec<usize> = tracks
        .iter()
        .flat_map(|t| t.runs.iter().flat_map(|r| [r.start, r.end]))
        .chain([0, len])
        .collect();
    points.sort_unstable();
    points.dedup();
    points
}

/// Walks the segments between breakpoints, yielding each segment with every
/// track's probability on it.
fn for_each_segment<T: Scalar>(tracks: &[&ProbTrack<T>], len: usize, mut f: impl FnMut(usize, usize, &[T])) {
    let points = breakpoints(tracks, len);
    let mut cursors = vec![0usize; tracks.len()];
    let mut probs = vec![T::zero(); tracks.len()];
    for seg in points.windows(2) {
        let (start, end) = (seg[0], seg[1]);
        for (i, track) in tracks.iter().enumerate() {
            let runs = &track.runs;
            while cursors[i] < runs.len() && runs[cursors[i]].end <= start {
                cursors[i] += 1;
            }
            probs[i] = match runs.get(cursors[i]) {
                Some(r) if r.start <= start => r.prob,
                _ => T::zero(),
            };
        }
        f(start, end, &probs);
    }
}

fn check_lengths<T>(tracks: &[&ProbTrack<T>]) -> Result<usize, EnsembleError> {
    let first = tracks.first().map(|t| t.length).unwrap_or(0);
    if let Some(other) = tracks.iter().find(|t| t.length != first) {
        return Err(EnsembleError::LengthMismatch {
            id: other.tweet_id.clone(),
            first,
            other: other.length,
        });
    }
    Ok(first)
}

/// Predicted spans for one tweet: maximal runs of characters whose weighted
/// score `sum_i w_i * p_i(c)` reaches the threshold (inclusive).
pub fn aggregate<T: Scalar>(tracks: &[&ProbTrack<T>], params: &Params<T>) -> Result<Vec<Span>, EnsembleError> {
    if tracks.len() != params.weights.len() {
        return Err(EnsembleError::CountMismatch {
            tracks: tracks.len(),
            weights: params.weights.len(),
        });
    }
    let len = check_lengths(tracks)?;
    let weights = params.normalized_weights();
    let mut spans: Vec<(usize, usize)> = Vec::new();
    for_each_segment(tracks, len, |start, end, probs| {
        let score: T = weights.iter().zip(probs).map(|(&w, &p)| w * p).sum();
        if score >= params.threshold && score > T::zero() {
            match spans.last_mut() {
                Some(last) if last.1 == start => last.1 = end,
                _ => spans.push((start, end)),
            }
        }
    });
    Ok(spans.into_iter().map(|(s, e)| Span::new(s, e).expect("segments are nonempty")).collect())
}

/// Per-character mean of the given tracks, run-length encoded.
pub fn average_tracks<T: Scalar>(tracks: &[&ProbTrack<T>]) -> Result<ProbTrack<T>, EnsembleError> {
    let first = tracks.first().ok_or(EnsembleError::NoModels)?;
    let len = check_lengths(tracks)?;
    let k = T::of_usize(tracks.len());
    let mut runs: Vec<Run<T>> = Vec::new();
    for_each_segment(tracks, len, |start, end, probs| {
        let mean = (probs.iter().copied().sum::<T>() / k).min(T::one());
        if mean <= T::zero() {
            return;
        }
        match runs.last_mut() {
            Some(last) if last.end == start && last.prob == mean => last.end = end,
            _ => runs.push(Run { start, end, prob: mean }),
        }
    });
    Ok(ProbTrack::new(first.tweet_id.clone(), len, runs)?)
}

fn aligned<T: Scalar>(sets: &[TrackSet<T>]) -> Result<Vec<Vec<&ProbTrack<T>>>, EnsembleError> {
    let first = sets.first().ok_or(EnsembleError::NoModels)?;
    for set in &sets[1..] {
        if let Some(extra) = set.ids().find(|id| first.get(id).is_none()) {
            return Err(TrackError::UnknownTweet(extra.to_string()).into());
        }
    }
    first
        .iter()
        .map(|track| {
            sets.iter()
                .map(|set| set.get(&track.tweet_id).ok_or_else(|| TrackError::MissingTweet(track.tweet_id.clone()).into()))
                .collect()
        })
        .collect()
}

/// Averages several models' track sets tweet by tweet. All sets must cover
/// the same tweet ids; output follows the first set's order.
pub fn average<T: Scalar>(sets: &[TrackSet<T>]) -> Result<TrackSet<T>, EnsembleError> {
    let groups = aligned(sets)?;
    let tracks: Result<Vec<_>, _> = groups.par_iter().map(|g| average_tracks(g)).collect();
    Ok(TrackSet::from_tracks(tracks?)?)
}

/// Runs [`aggregate`] over every tweet of `dataset`, returning a copy of the
/// dataset whose spans are the ensemble predictions (with surfaces).
pub fn aggregate_dataset<T: Scalar>(
    dataset: &Dataset,
    sets: &[TrackSet<T>],
    params: &Params<T>,
) -> Result<Dataset, EnsembleError> {
    for set in sets {
        set.check_against(dataset)?;
    }
    let tweets: Vec<&Tweet> = dataset.tweets().collect();
    let predicted: Result<Vec<Tweet>, EnsembleError> = tweets
        .par_iter()
        .map(|tweet| {
            let tracks: Vec<&ProbTrack<T>> = sets.iter().map(|s| s.get(tweet.id()).expect("checked")).collect();
            let spans = aggregate(&tracks, params)?
                .into_iter()
                .map(|s| Span::from_text(tweet.text(), s.start, s.end))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(tweet.with_spans(spans)?)
        })
        .collect();
    Ok(Dataset::new(format!("{}-ensemble", dataset.name()), predicted?)?)
}
