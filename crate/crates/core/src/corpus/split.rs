use rand::seq::SliceRandom;

use super::{CorpusError, Dataset};
use crate::rng::indexed_stream;

/// Round half up, tolerant of products like `0.7 * 5 = 3.4999999999999996`.
pub(crate) fn round_half_up(x: f64) -> usize {
    (x + 0.5 + 1e-9).floor().max(0.0) as usize
}

/// Split `dataset` into two parts so that the first holds
/// `round(ratio * positives)` positive and `round(ratio * negatives)`
/// negative tweets. Both parts keep the original tweet order.
pub fn stratified_split(dataset: &Dataset, ratio: f64, seed: u64) -> Result<(Dataset, Dataset), CorpusError> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(CorpusError::InvalidRatio(ratio));
    }
    if dataset.is_empty() {
        return Err(CorpusError::EmptyDataset);
    }

    let (mut positives, mut negatives): (Vec<usize>, Vec<usize>) =
        (0..dataset.len()).partition(|&i| dataset.tweets[i].is_positive());

    // one stream per stratum keeps the positive draw independent of the negatives
    positives.shuffle(&mut indexed_stream(seed, 0));
    negatives.shuffle(&mut indexed_stream(seed, 1));

    let mut in_first = vec![false; dataset.len()];
    let take_pos = round_half_up(ratio * positives.len() as f64).min(positives.len());
    let take_neg = round_half_up(ratio * negatives.len() as f64).min(negatives.len());
    for &i in positives[..take_pos].iter().chain(&negatives[..take_neg]) {
        in_first[i] = true;
    }

    let mut first = Vec::new();
    let mut second = Vec::new();
    for (tweet, chosen) in dataset.tweets().zip(in_first) {
        if chosen {
            first.push(tweet.clone());
        } else {
            second.push(tweet.clone());
        }
    }
    let name = dataset.name();
    Ok((
        Dataset::new(format!("{name}-train"), first)?,
        Dataset::new(format!("{name}-valid"), second)?,
    ))
}
