//! Grid search and TPE over a box-shaped space, maximizing an objective.
//!
//! The tuned quantity in this toolkit is the ensemble (weights, threshold)
//! vector scored by overlapping F1 (see [`EnsembleObjective`]), but the
//! optimizers accept any objective; minimize by negating.

mod grid;
mod log;
mod objective;
mod parzen;
mod space;
mod tpe;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::num::Scalar;

pub use self::grid::{grid_point, grid_search, grid_size};
pub use self::log::{parse_trial_log, read_trial_log, serialize_trial, TrialLogWriter};
pub use self::objective::EnsembleObjective;
pub use self::parzen::{Kernel, ParzenEstimator};
pub use self::space::{Dim, SearchSpace};
pub use self::tpe::{best_candidate, split_history, tpe_suggest, Suggestion, SuggestionKind, TpeConfig};

pub type BoxError = Box<dyn std::error::Error + Send + Sync>;

#[derive(Debug, Error)]
pub enum HpoError {
    #[error("invalid search space: {0}")]
    InvalidSpace(String),
    #[error("grid resolution must be at least 2 per dimension (got {0:?})")]
    BadResolution(Vec<usize>),
    #[error("budget must be at least 1")]
    ZeroBudget,
    #[error("objective failed at {point:?}: {source}")]
    Objective {
        point: Vec<f64>,
        #[source]
        source: BoxError,
    },
    #[error("objective returned non-finite value at {point:?}")]
    NonFinite { point: Vec<f64> },
    #[error("trial log entry {index} does not continue this run: {reason}")]
    LogMismatch { index: usize, reason: String },
    #[error("trial log: {0}")]
    Log(String),
}

/// One evaluated configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct TrialRecord<T> {
    pub index: usize,
    pub params: Vec<T>,
    pub objective: T,
}

pub(crate) fn evaluate_point<T: Scalar, F>(objective: &F, index: usize, params: Vec<T>) -> Result<TrialRecord<T>, HpoError>
where
    F: Fn(&[T]) -> Result<T, BoxError> + Sync + ?Sized,
{
    let as_f64 = |p: &[T]| p.iter().map(|x| x.as_f64()).collect::<Vec<_>>();
    let value = objective(&params).map_err(|source| HpoError::Objective {
        point: as_f64(&params),
        source,
    })?;
    if !value.is_finite() {
        return Err(HpoError::NonFinite { point: as_f64(&params) });
    }
    Ok(TrialRecord {
        index,
        params,
        objective: value,
    })
}

/// Highest objective; ties go to the lexicographically smallest parameters.
pub fn best_trial<T: Scalar>(history: &[TrialRecord<T>]) -> Option<&TrialRecord<T>> {
    history.iter().reduce(|best, t| {
        let better = t.objective > best.objective
            || (t.objective == best.objective
                && t.params.partial_cmp(&best.params) == Some(std::cmp::Ordering::Less));
        if better {
            t
        } else {
            best
        }
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    /// Cartesian grid, enumerated in lexicographic order. A single
    /// resolution applies to every dimension.
    Grid { resolution: Vec<usize> },
    Tpe(TpeConfig),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimizer<T> {
    pub space: SearchSpace<T>,
    pub method: Method,
    pub budget: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome<T> {
    pub best: TrialRecord<T>,
    pub history: Vec<TrialRecord<T>>,
}

impl<T: Scalar> Optimizer<T> {
    /// Runs the optimizer from scratch.
    pub fn run<F>(&self, objective: &F) -> Result<Outcome<T>, HpoError>
    where
        F: Fn(&[T]) -> Result<T, BoxError> + Sync + ?Sized,
    {
        self.resume(objective, Vec::new(), |_| Ok(()))
    }

    /// Continues from `history` (e.g. a trial log) until `budget` trials
    /// exist, reporting each new trial to `on_trial` as it completes.
    pub fn resume<F>(
        &self,
        objective: &F,
        mut history: Vec<TrialRecord<T>>,
        mut on_trial: impl FnMut(&TrialRecord<T>) -> Result<(), HpoError>,
    ) -> Result<Outcome<T>, HpoError>
    where
        F: Fn(&[T]) -> Result<T, BoxError> + Sync + ?Sized,
    {
        self.space.validate()?;
        if self.budget == 0 {
            return Err(HpoError::ZeroBudget);
        }
        for (i, t) in history.iter().enumerate() {
            if t.index != i {
                return Err(HpoError::LogMismatch {
                    index: t.index,
                    reason: format!("expected trial index {i}"),
                });
            }
            if !self.space.contains(&t.params) {
                return Err(HpoError::LogMismatch {
                    index: i,
                    reason: "parameters outside the search space".into(),
                });
            }
        }
        history.truncate(self.budget);

        match &self.method {
            Method::Grid { resolution } => {
                let resolution = grid::expand_resolution(&self.space, resolution)?;
                let total = grid_size(&resolution).min(self.budget);
                for t in &history {
                    if t.params != grid_point(&self.space, &resolution, t.index) {
                        return Err(HpoError::LogMismatch {
                            index: t.index,
                            reason: "parameters differ from the grid point".into(),
                        });
                    }
                }
                let fresh = grid::evaluate_range(&self.space, &resolution, history.len()..total.max(history.len()), objective)?;
                for t in fresh {
                    on_trial(&t)?;
                    history.push(t);
                }
            }
            Method::Tpe(cfg) => {
                while history.len() < self.budget {
                    let suggestion = tpe_suggest(&history, &self.space, cfg, self.seed);
                    let trial = evaluate_point(objective, history.len(), suggestion.params)?;
                    on_trial(&trial)?;
                    history.push(trial);
                }
            }
        }
        let best = best_trial(&history).expect("budget >= 1").clone();
        Ok(Outcome { best, history })
    }
}

/// Convenience wrapper over [`Optimizer::run`].
pub fn optimize<T: Scalar, F>(
    space: &SearchSpace<T>,
    method: Method,
    budget: usize,
    objective: &F,
    seed: u64,
) -> Result<Outcome<T>, HpoError>
where
    F: Fn(&[T]) -> Result<T, BoxError> + Sync + ?Sized,
{
    Optimizer {
        space: space.clone(),
        method,
        budget,
        seed,
    }
    .run(objective)
}
