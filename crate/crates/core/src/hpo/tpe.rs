//! Tree-structured Parzen estimator suggestions (maximization).

use log::info;

use super::parzen::ParzenEstimator;
use super::space::SearchSpace;
use super::TrialRecord;
use crate::num::Scalar;
use crate::rng::indexed_stream;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TpeConfig {
    /// Fraction of trials (by objective, best first) forming the "good" set.
    pub gamma: f64,
    /// Trials drawn uniformly before the model kicks in.
    pub n_startup: usize,
    /// Candidates drawn from the good density per suggestion.
    pub n_candidates: usize,
}

impl Default for TpeConfig {
    fn default() -> Self {
        TpeConfig {
            gamma: 0.25,
            n_startup: 20,
            n_candidates: 24,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuggestionKind {
    /// Fewer than `n_startup` trials so far: uniform draw.
    Startup,
    /// Every trial had the same objective, so the good/bad split carries no
    /// information: uniform draw.
    Degenerate,
    /// Maximizer of `l(x) / g(x)` among candidates drawn from `l`.
    Model,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Suggestion<T> {
    pub params: Vec<T>,
    pub kind: SuggestionKind,
}

/// Splits trial indices into (good, bad): the best `ceil(gamma * n)` trials
/// by objective (at least one), earlier trials first on ties.
pub fn split_history<T: Scalar>(history: &[TrialRecord<T>], gamma: f64) -> (Vec<usize>, Vec<usize>) {
    let mut order: Vec<usize> = (0..history.len()).collect();
    order.sort_by(|&a, &b| {
        history[b]
            .objective
            .partial_cmp(&history[a].objective)
            .expect("objectives are finite")
            .then(a.cmp(&b))
    });
    let n_good = ((gamma * history.len() as f64).ceil() as usize).clamp(1, history.len().max(1));
    let bad = order.split_off(n_good.min(order.len()));
    (order, bad)
}

/// Index of the candidate with the largest `sum_d ln l_d(x_d) - ln g_d(x_d)`;
/// the first one wins ties.
pub fn best_candidate<T: Scalar>(good: &[ParzenEstimator<T>], bad: &[ParzenEstimator<T>], candidates: &[Vec<T>]) -> usize {
    let score = |c: &Vec<T>| -> T {
        c.iter()
            .zip(good.iter().zip(bad))
            .map(|(&x, (l, g))| l.ln_pdf(x) - g.ln_pdf(x))
            .sum()
    };
    let mut best = 0;
    let mut best_score = T::neg_infinity();
    for (i, c) in candidates.iter().enumerate() {
        let s = score(c);
        if s > best_score {
            best = i;
            best_score = s;
        }
    }
    best
}

/// Next point to evaluate after `history`. The random stream is keyed by
/// `(seed, history.len())`, so a given history always yields the same point.
pub fn tpe_suggest<T: Scalar>(
    history: &[TrialRecord<T>],
    space: &SearchSpace<T>,
    cfg: &TpeConfig,
    seed: u64,
) -> Suggestion<T> {
    let mut rng = indexed_stream(seed, history.len() as u64);
    if history.len() < cfg.n_startup.max(1) {
        return Suggestion {
            params: space.sample_uniform(&mut rng),
            kind: SuggestionKind::Startup,
        };
    }
    let first = history[0].objective;
    if history.iter().all(|t| t.objective == first) {
        info!("tpe: all {} trials share objective {first}; sampling uniformly", history.len());
        return Suggestion {
            params: space.sample_uniform(&mut rng),
            kind: SuggestionKind::Degenerate,
        };
    }

    let (good, bad) = split_history(history, cfg.gamma);
    let fit = |members: &[usize]| -> Vec<ParzenEstimator<T>> {
        space
            .dims
            .iter()
            .enumerate()
            .map(|(d, dim)| {
                let values: Vec<T> = members.iter().map(|&i| history[i].params[d]).collect();
                ParzenEstimator::fit(dim, &values)
            })
            .collect()
    };
    let l = fit(&good);
    let g = fit(&bad);

    let candidates: Vec<Vec<T>> = (0..cfg.n_candidates.max(1))
        .map(|_| {
            l.iter()
                .zip(&space.dims)
                .map(|(est, dim)| loop {
                    let x = est.sample(&mut rng);
                    if dim.contains(x) {
                        break x;
                    }
                })
                .collect()
        })
        .collect();
    let best = best_candidate(&l, &g, &candidates);
    Suggestion {
        params: candidates[best].clone(),
        kind: SuggestionKind::Model,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::{Continuous, ContinuousCDF, Normal};

    fn record(index: usize, params: Vec<f64>, objective: f64) -> TrialRecord<f64> {
        TrialRecord { index, params, objective }
    }

    #[test]
    fn empty_history_is_uniform_startup() {
        let space = SearchSpace::<f64>::ensemble(3).unwrap();
        let s = tpe_suggest(&[], &space, &TpeConfig::default(), 11);
        assert_eq!(s.kind, SuggestionKind::Startup);
        assert!(space.contains(&s.params));
        assert_eq!(s, tpe_suggest(&[], &space, &TpeConfig::default(), 11));
    }

    #[test]
    fn degenerate_history_falls_back() {
        let space = SearchSpace::<f64>::ensemble(1).unwrap();
        let history: Vec<_> = (0..25).map(|i| record(i, vec![0.5, 0.5], 0.3)).collect();
        let s = tpe_suggest(&history, &space, &TpeConfig::default(), 0);
        assert_eq!(s.kind, SuggestionKind::Degenerate);
    }

    #[test]
    fn split_is_nonempty_and_prefers_earlier_ties() {
        let history: Vec<_> = (0..8).map(|i| record(i, vec![0.0], if i % 2 == 0 { 1.0 } else { 0.0 })).collect();
        let (good, bad) = split_history(&history, 0.25);
        assert_eq!(good, vec![0, 2]);
        assert_eq!(bad.len(), 6);
        let (good, _) = split_history(&history[..1], 0.25);
        assert_eq!(good, vec![0]);
    }

    #[test]
    fn candidate_choice_matches_closed_form_ratio() {
        let (low, high) = (0.0, 1.0);
        let l = ParzenEstimator::from_components(low, high, &[(0.2, 0.1, 1.0)], 0.0);
        let g = ParzenEstimator::from_components(low, high, &[(0.7, 0.2, 1.0)], 0.0);
        let truncated = |mu: f64, sigma: f64, x: f64| {
            let n = Normal::new(mu, sigma).unwrap();
            n.pdf(x) / (n.cdf(high) - n.cdf(low))
        };
        for candidates in [[0.1, 0.35, 0.9], [0.5, 0.45, 0.6], [0.95, 0.05, 0.3]] {
            let ratios: Vec<f64> = candidates.iter().map(|&x| truncated(0.2, 0.1, x) / truncated(0.7, 0.2, x)).collect();
            let expected = (0..3).max_by(|&a, &b| ratios[a].partial_cmp(&ratios[b]).unwrap()).unwrap();
            let cands: Vec<Vec<f64>> = candidates.iter().map(|&x| vec![x]).collect();
            assert_eq!(best_candidate(std::slice::from_ref(&l), std::slice::from_ref(&g), &cands), expected);
            for &x in &candidates {
                assert!((l.pdf(x) - truncated(0.2, 0.1, x)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn model_suggestions_stay_in_bounds() {
        let space = SearchSpace::<f64>::ensemble(2).unwrap();
        let mut history = Vec::new();
        for i in 0..60 {
            let s = tpe_suggest(&history, &space, &TpeConfig::default(), 3);
            assert!(space.contains(&s.params), "{:?}", s.params);
            let obj = 1.0 - (s.params[2] - 0.4).abs();
            history.push(record(i, s.params, obj));
        }
    }
}
