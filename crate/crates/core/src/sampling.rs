//! Bootstrap subsets for bagged ensemble members.

use std::collections::HashMap;


use rand::Rng;
use thiserror::Error;

use crate::corpus::{CorpusError, Dataset};
use crate::rng::indexed_stream;

#[derive(Debug, Error, PartialEq)]
pub enum SamplingError {
    #[error("cannot subsample an empty dataset")]
    EmptySource,
    #[error("number of subsets must be at least 1")]
    NoSubsets,
    #[error("sample fraction {0} outside (0, 1]")]
    InvalidFraction(f64),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsetPlan {
    pub k: usize,
    pub sample_fraction: f64,
    pub seed: u64,
}

impl Default for SubsetPlan {
    fn default() -> Self {
        SubsetPlan {
            k: 6,
            sample_fraction: 1.0,
            seed: 0,
        }
    }
}

impl SubsetPlan {
    pub fn validate(&self) -> Result<(), SamplingError> {
        if self.k == 0 {
            return Err(SamplingError::NoSubsets);
        }
        if !(self.sample_fraction > 0.0 && self.sample_fraction <= 1.0) {
            return Err(SamplingError::InvalidFraction(self.sample_fraction));
        }
        Ok(())
    }

    /// Subset size for a source of `n` tweets, never below 1.
    pub fn subset_size(&self, n: usize) -> usize {
        crate::corpus::round_half_up(self.sample_fraction * n as f64).max(1)
    }
}

/// Training subset plus the matching validation subset for one ensemble
/// member; external trainers use `validation` for early stopping.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetPair {
    pub index: usize,
    pub training: Dataset,
    pub validation: Dataset,
}

/// Draws one subset with replacement from the stream `(seed, stream)`.
/// Repeated draws of a tweet get ids `<id>#bs<n>`.
fn draw(source: &Dataset, size: usize, seed: u64, stream: u64, name: String) -> Result<Dataset, SamplingError> {
    let tweets: Vec<_> = source.tweets().collect();
    let mut rng = indexed_stream(seed, stream);
    let mut seen: HashMap<usize, usize> = HashMap::new();
    let mut out = Dataset::empty(name);
    for _ in 0..size {
        let i = rng.random_range(0..tweets.len());
        let n = seen.entry(i).or_insert(0);
        let tweet = if *n == 0 {
            tweets[i].clone()
        } else {
            let id = out.fresh_id(&format!("{}#bs{n}", tweets[i].id()), &Default::default());
            tweets[i].with_id(id)
        };
        *n += 1;
        out.push(tweet)?;
    }
    Ok(out)
}

/// `plan.k` bootstrap subsets of `source`; subset `i` uses stream `i`.
pub fn bootstrap_subsets(source: &Dataset, plan: &SubsetPlan) -> Result<Vec<Dataset>, SamplingError> {
    plan.validate()?;
    if source.is_empty() {
        return Err(SamplingError::EmptySource);
    }
    let size = plan.subset_size(source.len());
    (0..plan.k)
        .map(|i| draw(source, size, plan.seed, i as u64, format!("{}-subset{i}", source.name())))
        .collect()
}

/// Paired training/validation subsets. Validation draws use streams offset by
/// `k` so they never reuse a training stream.
pub fn bootstrap_pairs(
    training: &Dataset,
    validation: &Dataset,
    plan: &SubsetPlan,
) -> Result<Vec<SubsetPair>, SamplingError> {
    plan.validate()?;
    if training.is_empty() || validation.is_empty() {
        return Err(SamplingError::EmptySource);
    }
    let train_size = plan.subset_size(training.len());
    let valid_size = plan.subset_size(validation.len());
    (0..plan.k)
        .map(|i| {
            Ok(SubsetPair {
                index: i,
                training: draw(training, train_size, plan.seed, i as u64, format!("{}-subset{i}", training.name()))?,
                validation: draw(
                    validation,
                    valid_size,
                    plan.seed,
                    (plan.k + i) as u64,
                    format!("{}-subset{i}", validation.name()),
                )?,
            })
        })
        .collect()
}

/// Original id of a possibly duplicated subset member.
pub fn original_id(id: &str) -> &str {
    match id.rfind("#bs") {
        Some(pos) if id[pos + 3..].chars().all(|c| c.is_ascii_digit()) && pos + 3 < id.len() => &id[..pos],
        _ => id,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Tweet;
    use std::collections::HashSet;

    fn corpus(n: usize) -> Dataset {
        let tweets = (0..n).map(|i| Tweet::new(format!("t{i}"), "u", "x", vec![]).unwrap()).collect();
        Dataset::new("c", tweets).unwrap()
    }

    #[test]
    fn expected_distinct_count_matches_theory() {
        let d = corpus(100);
        let expected = 100.0 * (1.0 - (1.0f64 - 1.0 / 100.0).powi(100));
        assert!((expected - 63.4).abs() < 0.05);
        let mut total = 0usize;
        let runs = 200;
        for seed in 0..runs {
            let subsets = bootstrap_subsets(&d, &SubsetPlan { k: 6, sample_fraction: 1.0, seed }).unwrap();
            assert_eq!(subsets.len(), 6);
            for s in &subsets {
                assert_eq!(s.len(), 100);
                total += s.tweets().map(|t| original_id(t.id())).collect::<HashSet<_>>().len();
            }
        }
        let mean = total as f64 / (runs as usize * 6) as f64;
        assert!((mean - expected).abs() <= 3.0, "mean distinct {mean}");
    }

    #[test]
    fn deterministic_per_seed() {
        let d = corpus(30);
        let plan = SubsetPlan { k: 1, sample_fraction: 1.0, seed: 5 };
        assert_eq!(bootstrap_subsets(&d, &plan).unwrap(), bootstrap_subsets(&d, &plan).unwrap());
        let other = SubsetPlan { seed: 6, ..plan };
        assert_ne!(bootstrap_subsets(&d, &plan).unwrap(), bootstrap_subsets(&d, &other).unwrap());
    }

    #[test]
    fn members_come_from_source() {
        let d = corpus(25);
        let subsets = bootstrap_subsets(&d, &SubsetPlan { k: 3, sample_fraction: 0.6, seed: 1 }).unwrap();
        for (i, s) in subsets.iter().enumerate() {
            assert_eq!(s.len(), 15);
            assert_eq!(s.name(), format!("c-subset{i}"));
            assert!(s.tweets().all(|t| d.contains(original_id(t.id()))));
        }
        assert_ne!(subsets[0], subsets[1]);
    }

    #[test]
    fn small_fraction_floors_to_one() {
        let subsets = bootstrap_subsets(&corpus(10), &SubsetPlan { k: 2, sample_fraction: 0.01, seed: 0 }).unwrap();
        assert!(subsets.iter().all(|s| s.len() == 1));
        let subsets = bootstrap_subsets(&corpus(10), &SubsetPlan { k: 2, sample_fraction: 0.1, seed: 0 }).unwrap();
        assert!(subsets.iter().all(|s| s.len() == 1));
    }

    #[test]
    fn errors() {
        let plan = SubsetPlan::default();
        assert_eq!(bootstrap_subsets(&corpus(0), &plan), Err(SamplingError::EmptySource));
        assert_eq!(
            bootstrap_subsets(&corpus(3), &SubsetPlan { k: 0, ..plan }),
            Err(SamplingError::NoSubsets)
        );
        assert_eq!(
            bootstrap_subsets(&corpus(3), &SubsetPlan { sample_fraction: 1.5, ..plan }),
            Err(SamplingError::InvalidFraction(1.5))
        );
    }

    #[test]
    fn pairs_use_separate_streams() {
        let pairs = bootstrap_pairs(&corpus(20), &corpus(20).renamed("v"), &SubsetPlan { k: 2, ..Default::default() })
            .unwrap();
        assert_eq!(pairs.len(), 2);
        let train_ids: Vec<_> = pairs[0].training.tweets().map(|t| t.id().to_string()).collect();
        let valid_ids: Vec<_> = pairs[0].validation.tweets().map(|t| t.id().to_string()).collect();
        assert_ne!(train_ids, valid_ids);
        assert_eq!(original_id("t3#bs2"), "t3");
        assert_eq!(original_id("t3#bsx"), "t3#bsx");
    }
}
