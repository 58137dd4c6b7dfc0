//! Dictionary tagger used as a deterministic stand-in for neural models.
//!
//! Matching is case-insensitive and never cuts through an alphanumeric run:
//! "tums" does not fire inside "tantrums". Entries of at least
//! [`FUZZY_MIN_LEN`] characters also match whole-word windows within one
//! edit, so "asprin" is found by "aspirin".

use rayon::prelude::*;
use thiserror::Error;

use super::track::{ProbTrack, TrackSet};
use crate::corpus::{Dataset, Tweet};
use crate::lexicon::Lexicon;
use crate::num::Scalar;

pub const FUZZY_MIN_LEN: usize = 5;

#[derive(Debug, Error, PartialEq)]
pub enum GazetteerError {
    #[error("probabilities must satisfy 0 <= fuzzy ({fuzzy}) <= exact ({exact}) <= 1")]
    BadProbabilities { exact: f64, fuzzy: f64 },
    #[error("max edit distance must be 0 or 1, got {0}")]
    BadEditDistance(u8),
}

#[derive(Debug, Clone)]
pub struct GazetteerConfig<T> {
    pub lexicon: Lexicon,
    pub exact_prob: T,
    pub fuzzy_prob: T,
    pub max_edit_distance: u8,
}

impl<T: Scalar> GazetteerConfig<T> {
    /// Defaults: exact 0.9, fuzzy 0.6, one edit allowed.
    pub fn new(lexicon: Lexicon) -> Self {
        GazetteerConfig {
            lexicon,
            exact_prob: T::of(0.9),
            fuzzy_prob: T::of(0.6),
            max_edit_distance: 1,
        }
    }

    pub fn validate(&self) -> Result<(), GazetteerError> {
        let ok = self.fuzzy_prob >= T::zero() && self.fuzzy_prob <= self.exact_prob && self.exact_prob <= T::one();
        if !ok {
            return Err(GazetteerError::BadProbabilities {
                exact: self.exact_prob.as_f64(),
                fuzzy: self.fuzzy_prob.as_f64(),
            });
        }
        if self.max_edit_distance > 1 {
            return Err(GazetteerError::BadEditDistance(self.max_edit_distance));
        }
        Ok(())
    }
}

fn fold(c: char) -> char {
    let mut lower = c.to_lowercase();
    match (lower.next(), lower.next()) {
        (Some(l), None) => l,
        _ => c,
    }
}

/// True when `a` and `b` differ by at most one insertion, deletion or
/// substitution.
pub fn within_one_edit(a: &[char], b: &[char]) -> bool {
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    if long.len() - short.len() > 1 {
        return false;
    }
    let prefix = short.iter().zip(long).take_while(|(x, y)| x == y).count();
    if short.len() == long.len() {
        short[prefix..].len() <= 1 || short[prefix + 1..] == long[prefix + 1..]
    } else {
        short[prefix..] == long[prefix + 1..]
    }
}

/// Compiled matcher over a validated config.
#[derive(Debug, Clone)]
pub struct Gazetteer<T> {
    entries: Vec<Vec<char>>,
    exact_prob: T,
    fuzzy_prob: T,
    fuzzy: bool,
}

impl<T: Scalar> Gazetteer<T> {
    pub fn new(cfg: &GazetteerConfig<T>) -> Result<Self, GazetteerError> {
        cfg.validate()?;
        let mut entries: Vec<Vec<char>> = cfg.lexicon.entries().map(|e| e.chars().map(fold).collect()).collect();
        entries.sort();
        entries.dedup();
        Ok(Gazetteer {
            entries,
            exact_prob: cfg.exact_prob,
            fuzzy_prob: cfg.fuzzy_prob,
            fuzzy: cfg.max_edit_distance == 1 && cfg.fuzzy_prob > T::zero(),
        })
    }

    pub fn tag(&self, tweet: &Tweet) -> ProbTrack<T> {
        let text: Vec<char> = tweet.text().chars().map(fold).collect();
        ProbTrack::from_dense(tweet.id(), &self.score(&text))
    }

    fn score(&self, text: &[char]) -> Vec<T> {
        let n = text.len();
        let mut probs = vec![T::zero(); n];
        let alnum: Vec<bool> = text.iter().map(|c| c.is_alphanumeric()).collect();
        // cut[i]: position i does not split an alphanumeric run
        let cut: Vec<bool> = (0..=n).map(|i| i == 0 || i == n || !(alnum[i - 1] && alnum[i])).collect();
        let mut mark = |start: usize, end: usize, p: T| {
            for slot in &mut probs[start..end] {
                if p > *slot {
                    *slot = p;
                }
            }
        };

        for entry in &self.entries {
            let len = entry.len();
            if len == 0 || len > n {
                continue;
            }
            for start in 0..=n - len {
                if cut[start] && cut[start + len] && text[start..start + len] == entry[..] {
                    mark(start, start + len, self.exact_prob);
                }
            }
        }

        if self.fuzzy {
            // whole-word windows: alphanumeric at both edges, cut on both sides
            let word_start: Vec<usize> = (0..n).filter(|&i| alnum[i] && cut[i]).collect();
            let word_end: Vec<usize> = (1..=n).filter(|&i| alnum[i - 1] && cut[i]).collect();
            for entry in self.entries.iter().filter(|e| e.len() >= FUZZY_MIN_LEN) {
                let len = entry.len();
                for &start in &word_start {
                    for &end in word_end.iter().filter(|&&e| e > start) {
                        let width = end - start;
                        if width + 1 < len {
                            continue;
                        }
                        if width > len + 1 {
                            break;
                        }
                        let window = &text[start..end];
                        if window != &entry[..] && within_one_edit(window, entry) {
                            mark(start, end, self.fuzzy_prob);
                        }
                    }
                }
            }
        }
        probs
    }

    pub fn tag_dataset(&self, dataset: &Dataset) -> TrackSet<T> {
        let tweets: Vec<&Tweet> = dataset.tweets().collect();
        let tracks: Vec<ProbTrack<T>> = tweets.par_iter().map(|t| self.tag(t)).collect();
        TrackSet::from_tracks(tracks).expect("dataset ids are unique")
    }
}

/// Tags one tweet.
pub fn tag<T: Scalar>(tweet: &Tweet, cfg: &GazetteerConfig<T>) -> Result<ProbTrack<T>, GazetteerError> {
    Ok(Gazetteer::new(cfg)?.tag(tweet))
}

/// Tags every tweet, one track per tweet in dataset order.
pub fn tag_dataset<T: Scalar>(dataset: &Dataset, cfg: &GazetteerConfig<T>) -> Result<TrackSet<T>, GazetteerError> {
    Ok(Gazetteer::new(cfg)?.tag_dataset(dataset))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tagger::track::Run;

    fn cfg(entries: &[&str]) -> GazetteerConfig<f64> {
        GazetteerConfig::new(entries.iter().copied().collect())
    }

    fn tweet(text: &str) -> Tweet {
        Tweet::new("t", "u", text, vec![]).unwrap()
    }

    fn runs(text: &str, entries: &[&str]) -> Vec<(usize, usize, f64)> {
        tag(&tweet(text), &cfg(entries)).unwrap().runs.into_iter().map(|r| (r.start, r.end, r.prob)).collect()
    }

    /// Full dynamic-programming Levenshtein distance.
    fn levenshtein(a: &[char], b: &[char]) -> usize {
        let mut prev: Vec<usize> = (0..=b.len()).collect();
        for (i, ca) in a.iter().enumerate() {
            let mut cur = vec![i + 1; b.len() + 1];
            for (j, cb) in b.iter().enumerate() {
                cur[j + 1] = (prev[j] + usize::from(ca != cb)).min(prev[j + 1] + 1).min(cur[j] + 1);
            }
            prev = cur;
        }
        prev[b.len()]
    }

    #[test]
    fn exact_match() {
        assert_eq!(runs("took tylenol", &["tylenol"]), vec![(5, 12, 0.9)]);
        assert_eq!(runs("took TYLENOL.", &["Tylenol"]), vec![(5, 12, 0.9)]);
    }

    #[test]
    fn fuzzy_match_within_one_edit() {
        let a: Vec<char> = "asprin".chars().collect();
        let b: Vec<char> = "aspirin".chars().collect();
        assert_eq!(levenshtein(&a, &b), 1);
        assert_eq!(runs("took asprin", &["aspirin"]), vec![(5, 11, 0.6)]);
        // short entries never match fuzzily
        assert!(runs("took tuns", &["tums"]).is_empty());
        // two edits away
        assert!(runs("took asprn", &["aspirin"]).is_empty());
    }

    #[test]
    fn one_edit_check_agrees_with_levenshtein() {
        let words = ["aspirin", "asprin", "aspirin!", "spirin", "aspiring", "aspirni", "xaspirin", "asp", "", "a", "ab", "ba"];
        for a in words {
            for b in words {
                let (a, b): (Vec<char>, Vec<char>) = (a.chars().collect(), b.chars().collect());
                assert_eq!(within_one_edit(&a, &b), levenshtein(&a, &b) <= 1, "{a:?} {b:?}");
            }
        }
    }

    #[test]
    fn respects_word_boundaries() {
        assert!(runs("my tantrums", &["tums"]).is_empty());
        assert_eq!(runs("tums,tums", &["tums"]), vec![(0, 4, 0.9), (5, 9, 0.9)]);
        assert_eq!(runs("#tylenol", &["tylenol"]), vec![(1, 8, 0.9)]);
    }

    #[test]
    fn empty_lexicon_and_no_drugs() {
        assert!(runs("took tylenol", &[]).is_empty());
        let d = Dataset::new("d", vec![Tweet::new("a", "u", "hello", vec![]).unwrap(), Tweet::new("b", "u", "", vec![]).unwrap()])
            .unwrap();
        let set = tag_dataset(&d, &cfg(&["tylenol"])).unwrap();
        assert_eq!(set.len(), 2);
        assert!(set.iter().all(|t| t.runs.is_empty()));
    }

    #[test]
    fn multi_word_entry_matches_across_space() {
        let text = "on birth control again";
        // oracle: scan every window whose ends fall on word boundaries
        let chars: Vec<char> = text.chars().collect();
        let mut expected = vec![];
        for s in 0..chars.len() {
            for e in s + 1..=chars.len() {
                let left_ok = s == 0 || !chars[s - 1].is_alphanumeric() || !chars[s].is_alphanumeric();
                let right_ok = e == chars.len() || !chars[e - 1].is_alphanumeric() || !chars[e].is_alphanumeric();
                if left_ok && right_ok && chars[s..e].iter().collect::<String>() == "birth control" {
                    expected.push((s, e, 0.9));
                }
            }
        }
        assert_eq!(expected, vec![(3, 16, 0.9)]);
        assert_eq!(runs(text, &["birth control"]), expected);
    }

    #[test]
    fn overlaps_resolve_by_max() {
        let mut c = cfg(&["prenatal vitamins", "vitamins"]);
        c.exact_prob = 0.8;
        let t = tag(&tweet("prenatal vitaminss"), &c).unwrap();
        // fuzzy on the long entry (extra s), exact on nothing
        assert_eq!(t.runs, vec![Run { start: 0, end: 18, prob: 0.6 }]);
        let t = tag(&tweet("prenatal vitamins"), &c).unwrap();
        assert_eq!(t.runs, vec![Run { start: 0, end: 17, prob: 0.8 }]);
    }

    #[test]
    fn config_validation() {
        let mut c = cfg(&["x"]);
        c.fuzzy_prob = 0.95;
        assert!(matches!(c.validate(), Err(GazetteerError::BadProbabilities { .. })));
        let mut c = cfg(&["x"]);
        c.max_edit_distance = 2;
        assert_eq!(c.validate(), Err(GazetteerError::BadEditDistance(2)));
    }
}
