//! Strict and overlapping precision/recall/F1 over predicted spans, and a
//! mechanical error breakdown.
//!
//! Matching is one-to-one. Strict pairs need identical extents; overlapping
//! pairs need one shared character and are matched greedily: predictions in
//! ascending start order each take the first unmatched overlapping gold span.
//! Metrics are micro-averaged over all spans of the corpus.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::corpus::{Dataset, Span, Tweet};
use crate::num::Ratio;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("prediction for tweet {0:?} which is not in the gold corpus")]
    UnknownTweet(String),
    #[error("prediction text for tweet {0:?} differs from the gold text")]
    TextMismatch(String),
}

/// Precision, recall and F1 for one matching mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prf<R> {
    pub precision: R,
    pub recall: R,
    pub f1: R,
}

impl<R: Ratio> Prf<R> {
    /// Both sides empty counts as perfect; exactly one side empty as zero.
    pub fn from_counts(tp: usize, n_pred: usize, n_gold: usize) -> Self {
        if n_pred == 0 && n_gold == 0 {
            return Prf {
                precision: R::one(),
                recall: R::one(),
                f1: R::one(),
            };
        }
        let precision = if n_pred == 0 { R::zero() } else { R::of_counts(tp, n_pred) };
        let recall = if n_gold == 0 { R::zero() } else { R::of_counts(tp, n_gold) };
        let sum = precision + recall;
        let f1 = if sum == R::zero() {
            R::zero()
        } else {
            (R::one() + R::one()) * precision * recall / sum
        };
        Prf { precision, recall, f1 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub tp_strict: usize,
    pub tp_overlap: usize,
    pub n_pred: usize,
    pub n_gold: usize,
}

impl std::ops::Add for Counts {
    type Output = Counts;

    fn add(self, o: Counts) -> Counts {
        Counts {
            tp_strict: self.tp_strict + o.tp_strict,
            tp_overlap: self.tp_overlap + o.tp_overlap,
            n_pred: self.n_pred + o.n_pred,
            n_gold: self.n_gold + o.n_gold,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Report<R> {
    pub strict: Prf<R>,
    pub overlapping: Prf<R>,
    pub counts: Counts,
}

impl<R: Ratio> Report<R> {
    pub fn from_counts(counts: Counts) -> Self {
        Report {
            strict: Prf::from_counts(counts.tp_strict, counts.n_pred, counts.n_gold),
            overlapping: Prf::from_counts(counts.tp_overlap, counts.n_pred, counts.n_gold),
            counts,
        }
    }

    pub fn to_f64(&self) -> Report<f64> {
        let conv = |p: Prf<R>| Prf {
            precision: p.precision.approx(),
            recall: p.recall.approx(),
            f1: p.f1.approx(),
        };
        Report {
            strict: conv(self.strict),
            overlapping: conv(self.overlapping),
            counts: self.counts,
        }
    }
}

impl Report<f64> {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializing metrics")
    }
}

/// Rows laid out as model name, overlapping F1/P/R, strict F1/P/R.
pub struct Table<'a>(pub &'a [(&'a str, Report<f64>)]);

impl fmt::Display for Table<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.0.iter().map(|(n, _)| n.len()).max().unwrap_or(0).max(5);
        writeln!(f, "{:width$}  {:^22}  {:^22}", "", "Overlapping", "Strict")?;
        writeln!(
            f,
            "{:width$}  {:>6} {:>7} {:>7}  {:>6} {:>7} {:>7}",
            "Model", "F1", "P", "R", "F1", "P", "R"
        )?;
        for (name, r) in self.0 {
            writeln!(
                f,
                "{name:width$}  {:>6.3} {:>7.3} {:>7.3}  {:>6.3} {:>7.3} {:>7.3}",
                r.overlapping.f1, r.overlapping.precision, r.overlapping.recall, r.strict.f1, r.strict.precision, r.strict.recall
            )?;
        }
        Ok(())
    }
}

/// Number of exactly matching pairs between two disjoint sorted span lists.
pub fn strict_matches(gold: &[Span], pred: &[Span]) -> usize {
    let mut used = vec![false; gold.len()];
    pred.iter()
        .filter(|p| match gold.iter().enumerate().find(|(i, g)| !used[*i] && g.same_extent(p)) {
            Some((i, _)) => {
                used[i] = true;
                true
            }
            None => false,
        })
        .count()
}

/// Greedy one-to-one overlap matching. Returns, for every prediction, the
/// index of the gold span it was paired with.
pub fn overlap_pairs(gold: &[Span], pred: &[Span]) -> Vec<Option<usize>> {
    let mut order: Vec<usize> = (0..pred.len()).collect();
    order.sort_by_key(|&i| (pred[i].start, pred[i].end));
    let mut gold_order: Vec<usize> = (0..gold.len()).collect();
    gold_order.sort_by_key(|&i| (gold[i].start, gold[i].end));
    let mut used = vec![false; gold.len()];
    let mut pairs = vec![None; pred.len()];
    for p in order {
        if let Some(&g) = gold_order.iter().find(|&&g| !used[g] && gold[g].overlaps(&pred[p])) {
            used[g] = true;
            pairs[p] = Some(g);
        }
    }
    pairs
}

pub fn overlap_matches(gold: &[Span], pred: &[Span]) -> usize {
    overlap_pairs(gold, pred).iter().flatten().count()
}

pub fn tweet_counts(gold: &[Span], pred: &[Span]) -> Counts {
    Counts {
        tp_strict: strict_matches(gold, pred),
        tp_overlap: overlap_matches(gold, pred),
        n_pred: pred.len(),
        n_gold: gold.len(),
    }
}

fn paired<'a>(gold: &'a Dataset, pred: &'a Dataset) -> Result<Vec<(&'a Tweet, Option<&'a Tweet>)>, EvalError> {
    for p in pred.tweets() {
        let g = gold.get(p.id()).ok_or_else(|| EvalError::UnknownTweet(p.id().to_string()))?;
        if g.text() != p.text() {
            return Err(EvalError::TextMismatch(p.id().to_string()));
        }
    }
    Ok(gold.tweets().map(|g| (g, pred.get(g.id()))).collect())
}

/// Raw match counts of `pred` against `gold`. Gold tweets without a
/// prediction entry count as predicting nothing.
pub fn count(gold: &Dataset, pred: &Dataset) -> Result<Counts, EvalError> {
    let pairs = paired(gold, pred)?;
    Ok(pairs
        .par_iter()
        .map(|(g, p)| tweet_counts(g.spans(), p.map(|p| p.spans()).unwrap_or_default()))
        .reduce(Counts::default, |a, b| a + b))
}

pub fn evaluate<R: Ratio>(gold: &Dataset, pred: &Dataset) -> Result<Report<R>, EvalError> {
    Ok(Report::from_counts(count(gold, pred)?))
}

/// Case-insensitive occurrence counts of annotated surfaces in training data.
#[derive(Debug, Clone, Default)]
pub struct SurfaceCounts {
    counts: HashMap<String, usize>,
}

impl SurfaceCounts {
    pub fn from_datasets<'a>(datasets: impl IntoIterator<Item = &'a Dataset>) -> Self {
        let mut counts: HashMap<String, usize> = HashMap::new();
        for d in datasets {
            for t in d.tweets() {
                for s in t.spans() {
                    *counts.entry(t.surface(s).to_lowercase()).or_default() += 1;
                }
            }
        }
        SurfaceCounts { counts }
    }

    pub fn get(&self, surface: &str) -> usize {
        self.counts.get(&surface.to_lowercase()).copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ErrorTally {
    pub false_positive: usize,
    pub fn_rarely_seen: usize,
    pub fn_other: usize,
    pub fn_complex_phrase: usize,
    /// Overlap matches whose extents differ from the gold span.
    pub boundary_mismatch: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MissCategory {
    ComplexPhrase,
    RarelySeen,
    Other,
}

/// Complex phrases (three or more alphanumeric words, or an embedded
/// hashtag) take precedence over rarity; a surface seen fewer than twice in
/// training is "rarely seen"; anything else is "other".
pub fn classify_miss(surface: &str, training: &SurfaceCounts) -> MissCategory {
    let words = surface.split(|c: char| !c.is_alphanumeric()).filter(|w| !w.is_empty()).count();
    if words >= 3 || surface.contains('#') {
        MissCategory::ComplexPhrase
    } else if training.get(surface) < 2 {
        MissCategory::RarelySeen
    } else {
        MissCategory::Other
    }
}

/// Error tally based on the overlapping matching: unmatched predictions are
/// false positives, unmatched gold spans are false negatives.
pub fn categorize_errors(gold: &Dataset, pred: &Dataset, training: &SurfaceCounts) -> Result<ErrorTally, EvalError> {
    let mut tally = ErrorTally::default();
    for (g, p) in paired(gold, pred)? {
        let pred_spans = p.map(|p| p.spans()).unwrap_or_default();
        let pairs = overlap_pairs(g.spans(), pred_spans);
        let mut matched = vec![false; g.spans().len()];
        for (pi, pair) in pairs.iter().enumerate() {
            match pair {
                Some(gi) => {
                    matched[*gi] = true;
                    if !g.spans()[*gi].same_extent(&pred_spans[pi]) {
                        tally.boundary_mismatch += 1;
                    }
                }
                None => tally.false_positive += 1,
            }
        }
        for (span, _) in g.spans().iter().zip(&matched).filter(|(_, m)| !**m) {
            match classify_miss(g.surface(span), training) {
                MissCategory::ComplexPhrase => tally.fn_complex_phrase += 1,
                MissCategory::RarelySeen => tally.fn_rarely_seen += 1,
                MissCategory::Other => tally.fn_other += 1,
            }
        }
    }
    Ok(tally)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio as Q;

    fn tweet(id: &str, text: &str, spans: &[(usize, usize)]) -> Tweet {
        let spans = spans.iter().map(|&(s, e)| Span::new(s, e).unwrap()).collect();
        Tweet::new(id, "u", text, spans).unwrap()
    }

    fn ds(tweets: Vec<Tweet>) -> Dataset {
        Dataset::new("d", tweets).unwrap()
    }

    const TEXT: &str = "xxxxx tylenol and some advil plus junk text here";

    #[test]
    fn identical_predictions_are_perfect() {
        let gold = ds(vec![tweet("a", TEXT, &[(6, 13), (23, 28)]), tweet("b", "none", &[])]);
        let r: Report<f64> = evaluate(&gold, &gold).unwrap();
        for v in [r.strict, r.overlapping] {
            assert_eq!((v.precision, v.recall, v.f1), (1.0, 1.0, 1.0));
        }
    }

    #[test]
    fn off_by_one_end() {
        let gold = ds(vec![tweet("a", TEXT, &[(5, 12)])]);
        let pred = ds(vec![tweet("a", TEXT, &[(5, 13)])]);
        let r: Report<f64> = evaluate(&gold, &pred).unwrap();
        assert_eq!((r.strict.precision, r.strict.recall, r.strict.f1), (0.0, 0.0, 0.0));
        assert_eq!((r.overlapping.precision, r.overlapping.recall, r.overlapping.f1), (1.0, 1.0, 1.0));
    }

    #[test]
    fn exact_partial_spurious() {
        let gold = ds(vec![tweet("a", TEXT, &[(6, 13), (23, 28)])]);
        let pred = ds(vec![tweet("a", TEXT, &[(6, 13), (22, 26), (34, 38)])]);
        let r: Report<Q<u64>> = evaluate(&gold, &pred).unwrap();
        assert_eq!(r.strict.precision, Q::new(1, 3));
        assert_eq!(r.strict.recall, Q::new(1, 2));
        assert_eq!(r.strict.f1, Q::new(2, 5));
        assert_eq!(r.overlapping.precision, Q::new(2, 3));
        assert_eq!(r.overlapping.recall, Q::new(1, 1));
        assert_eq!(r.overlapping.f1, Q::new(4, 5));
    }

    #[test]
    fn empty_conventions() {
        let gold = ds(vec![tweet("a", "text", &[])]);
        let r: Report<f64> = evaluate(&gold, &gold).unwrap();
        assert_eq!(r.strict.f1, 1.0);
        let pos = ds(vec![tweet("a", "text", &[(0, 4)])]);
        let r: Report<f64> = evaluate(&pos, &gold).unwrap();
        assert_eq!((r.overlapping.precision, r.overlapping.recall, r.overlapping.f1), (0.0, 0.0, 0.0));
        let r: Report<f64> = evaluate(&gold, &pos).unwrap();
        assert_eq!((r.overlapping.precision, r.overlapping.recall, r.overlapping.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn missing_and_unknown_predictions() {
        let gold = ds(vec![tweet("a", "tums", &[(0, 4)]), tweet("b", "tums", &[(0, 4)])]);
        let pred = ds(vec![tweet("a", "tums", &[(0, 4)])]);
        let r: Report<f64> = evaluate(&gold, &pred).unwrap();
        assert_eq!(r.counts, Counts { tp_strict: 1, tp_overlap: 1, n_pred: 1, n_gold: 2 });
        let stray = ds(vec![tweet("z", "tums", &[])]);
        assert_eq!(evaluate::<f64>(&gold, &stray), Err(EvalError::UnknownTweet("z".into())));
        let changed = ds(vec![tweet("a", "tumz", &[])]);
        assert_eq!(evaluate::<f64>(&gold, &changed), Err(EvalError::TextMismatch("a".into())));
    }

    #[test]
    fn one_long_prediction_matches_one_gold() {
        let gold = vec![Span::new(0, 3).unwrap(), Span::new(5, 8).unwrap()];
        let pred = vec![Span::new(0, 8).unwrap()];
        assert_eq!(overlap_matches(&gold, &pred), 1);
    }

    #[test]
    fn error_categories() {
        let training = SurfaceCounts::from_datasets([&ds(vec![
            tweet("1", "vicks vapo rub", &[(0, 14)]),
            tweet("2", "vicks vapo rub", &[(0, 14)]),
            tweet("3", "tylenol tylenol", &[(0, 7), (8, 15)]),
        ])]);
        assert_eq!(classify_miss("Bio-oil", &training), MissCategory::RarelySeen);
        assert_eq!(classify_miss("#LifeWithAZofranPump", &training), MissCategory::ComplexPhrase);
        assert_eq!(classify_miss("TYLENOL", &training), MissCategory::Other);

        let text = "Bio-oil and #LifeWithAZofranPump and tylenol and flu shot";
        let gold = ds(vec![tweet("a", text, &[(0, 7), (12, 32), (37, 44)])]);
        let pred = ds(vec![tweet("a", text, &[(0, 3), (49, 57)])]);
        let tally = categorize_errors(&gold, &pred, &training).unwrap();
        assert_eq!(
            tally,
            ErrorTally { false_positive: 1, fn_rarely_seen: 0, fn_other: 1, fn_complex_phrase: 1, boundary_mismatch: 1 }
        );
        assert_eq!(categorize_errors(&gold, &gold, &training).unwrap(), ErrorTally::default());
    }

    #[test]
    fn table_layout() {
        let gold = ds(vec![tweet("a", "tums", &[(0, 4)])]);
        let r: Report<f64> = evaluate(&gold, &gold).unwrap();
        let s = Table(&[("ensemble", r)]).to_string();
        assert!(s.contains("Overlapping") && s.contains("ensemble   1.000"), "{s}");
    }
}
