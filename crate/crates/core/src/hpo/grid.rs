use std::ops::Range;

use rayon::prelude::*;

use super::{best_trial, evaluate_point, BoxError, HpoError, SearchSpace, TrialRecord};
use crate::num::Scalar;

pub(crate) fn expand_resolution<T: Scalar>(space: &SearchSpace<T>, resolution: &[usize]) -> Result<Vec<usize>, HpoError> {
    let expanded = match resolution {
        [r] => vec![*r; space.len()],
        r if r.len() == space.len() => r.to_vec(),
        r => return Err(HpoError::BadResolution(r.to_vec())),
    };
    if expanded.iter().any(|&r| r < 2) {
        return Err(HpoError::BadResolution(expanded));
    }
    Ok(expanded)
}

pub fn grid_size(resolution: &[usize]) -> usize {
    resolution.iter().product()
}

/// Grid point number `index` in lexicographic order (last dimension varies
/// fastest). Resolution must already be one entry per dimension.
pub fn grid_point<T: Scalar>(space: &SearchSpace<T>, resolution: &[usize], index: usize) -> Vec<T> {
    point_from_grids(&axes(space, resolution), index)
}

fn axes<T: Scalar>(space: &SearchSpace<T>, resolution: &[usize]) -> Vec<Vec<T>> {
    space.dims.iter().zip(resolution).map(|(d, &r)| d.grid(r)).collect()
}

fn point_from_grids<T: Scalar>(grids: &[Vec<T>], mut index: usize) -> Vec<T> {
    let mut point = vec![T::zero(); grids.len()];
    for d in (0..grids.len()).rev() {
        point[d] = grids[d][index % grids[d].len()];
        index /= grids[d].len();
    }
    point
}

pub(crate) fn evaluate_range<T: Scalar, F>(
    space: &SearchSpace<T>,
    resolution: &[usize],
    range: Range<usize>,
    objective: &F,
) -> Result<Vec<TrialRecord<T>>, HpoError>
where
    F: Fn(&[T]) -> Result<T, BoxError> + Sync + ?Sized,
{
    let grids = axes(space, resolution);
    // collect keeps enumeration order, so the first error and the history are
    // independent of scheduling
    range
        .into_par_iter()
        .map(|i| evaluate_point(objective, i, point_from_grids(&grids, i)))
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// Evaluates the full grid (or its first `budget` points) and returns the
/// best trial and the history in enumeration order.
pub fn grid_search<T: Scalar, F>(
    space: &SearchSpace<T>,
    resolution: &[usize],
    objective: &F,
    budget: Option<usize>,
) -> Result<(TrialRecord<T>, Vec<TrialRecord<T>>), HpoError>
where
    F: Fn(&[T]) -> Result<T, BoxError> + Sync + ?Sized,
{
    space.validate()?;
    let resolution = expand_resolution(space, resolution)?;
    let total = grid_size(&resolution).min(budget.unwrap_or(usize::MAX));
    if total == 0 {
        return Err(HpoError::ZeroBudget);
    }
    let history = evaluate_range(space, &resolution, 0..total, objective)?;
    let best = best_trial(&history).expect("nonempty").clone();
    Ok((best, history))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hpo::Dim;

    #[test]
    fn constant_objective_picks_smallest_point() {
        let space = SearchSpace::<f64>::ensemble(2).unwrap();
        let (best, history) = grid_search(&space, &[3], &|_: &[f64]| Ok(0.5), None).unwrap();
        assert_eq!(history.len(), 27);
        assert_eq!(best.params, vec![0.0, 0.0, 0.25]);
        assert_eq!(best.index, 0);
    }

    #[test]
    fn quadratic_on_threshold_grid() {
        let space = SearchSpace::new(vec![Dim::open("t", 0.0, 1.0)]).unwrap();
        let (best, history) = grid_search(&space, &[9], &|p: &[f64]| Ok(-(p[0] - 0.5).powi(2)), None).unwrap();
        assert_eq!(history.len(), 9);
        assert!((best.params[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn enumeration_is_lexicographic() {
        let space = SearchSpace::new(vec![Dim::closed("a", 0.0, 1.0), Dim::closed("b", 0.0, 2.0)]).unwrap();
        let (_, history) = grid_search(&space, &[2, 3], &|_: &[f64]| Ok(0.0), None).unwrap();
        let points: Vec<Vec<f64>> = history.iter().map(|t| t.params.clone()).collect();
        let mut sorted = points.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(points, sorted);
        assert_eq!(points[4], vec![1.0, 1.0]);
        assert_eq!(grid_point(&space, &[2, 3], 4), vec![1.0, 1.0]);
    }

    #[test]
    fn resolution_checks() {
        let space = SearchSpace::<f64>::ensemble(2).unwrap();
        assert!(matches!(grid_search(&space, &[1], &|_: &[f64]| Ok(0.0), None), Err(HpoError::BadResolution(_))));
        assert!(matches!(grid_search(&space, &[2, 2], &|_: &[f64]| Ok(0.0), None), Err(HpoError::BadResolution(_))));
        let (_, h) = grid_search(&space, &[2, 3, 4], &|_: &[f64]| Ok(0.0), Some(5)).unwrap();
        assert_eq!(h.len(), 5);
    }
}
