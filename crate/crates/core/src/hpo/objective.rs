use crate::corpus::{Dataset, Span};
use crate::ensemble::{aggregate, EnsembleError, Params};
use crate::eval::{tweet_counts, Counts, Prf, Report};
use crate::num::Scalar;
use crate::tagger::{ProbTrack, TrackSet};

use super::BoxError;

/// Overlapping F1 of the ensemble on a validation corpus, as a function of
/// the point `[w_1, .., w_k, threshold]`.
///
/// Points whose weights are all zero describe no ensemble and score 0.
#[derive(Debug, Clone)]
pub struct EnsembleObjective<T> {
    items: Vec<(Vec<Span>, Vec<ProbTrack<T>>)>,
    models: usize,
}

impl<T: Scalar> EnsembleObjective<T> {
    pub fn new(gold: &Dataset, models: &[TrackSet<T>]) -> Result<Self, EnsembleError> {
        if models.is_empty() {
            return Err(EnsembleError::NoModels);
        }
        for set in models {
            set.check_against(gold)?;
        }
        let items = gold
            .tweets()
            .map(|t| {
                let tracks = models.iter().map(|m| m.get(t.id()).expect("checked").clone()).collect();
                (t.spans().to_vec(), tracks)
            })
            .collect();
        Ok(EnsembleObjective {
            items,
            models: models.len(),
        })
    }

    pub fn models(&self) -> usize {
        self.models
    }

    fn params(&self, point: &[T]) -> Result<Option<Params<T>>, EnsembleError> {
        if point.len() != self.models + 1 {
            return Err(EnsembleError::CountMismatch {
                tracks: self.models,
                weights: point.len().saturating_sub(1),
            });
        }
        let (weights, threshold) = point.split_at(self.models);
        if weights.iter().all(|&w| w == T::zero()) {
            return Ok(None);
        }
        Params::new(weights.to_vec(), threshold[0]).map(Some)
    }

    pub fn counts(&self, point: &[T]) -> Result<Counts, EnsembleError> {
        let params = self.params(point)?;
        let mut total = Counts::default();
        for (gold, tracks) in &self.items {
            let pred = match &params {
                Some(p) => {
                    let refs: Vec<&ProbTrack<T>> = tracks.iter().collect();
                    aggregate(&refs, p)?
                }
                None => Vec::new(),
            };
            total = total + tweet_counts(gold, &pred);
        }
        Ok(total)
    }

    pub fn report(&self, point: &[T]) -> Result<Report<T>, EnsembleError> {
        Ok(Report::from_counts(self.counts(point)?))
    }

    pub fn score(&self, point: &[T]) -> Result<T, BoxError> {
        let c = self.counts(point)?;
        Ok(Prf::<T>::from_counts(c.tp_overlap, c.n_pred, c.n_gold).f1)
    }
}
