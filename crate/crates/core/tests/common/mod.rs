//! Corpus builders shared by the integration test targets.
#![allow(dead_code)]

use std::path::{Path, PathBuf};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rxtweet::tagger::{ProbTrack, Run, TrackSet};
use rxtweet::{Dataset, Span, Tweet};

pub fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub const DRUGS: &[&str] = &[
    "tylenol",
    "Zofran",
    "birth control",
    "asprin",
    "prenatal vitamins",
    "Follistim",
    "tums",
    "ibuprofen",
    "Bio-oil",
    "naïve-drug",
    "エピ",
];

pub const WORDS: &[&str] = &[
    "took", "the", "and", "😩", "#pregnancy", "ça", "va", "日本", "lol", "!!", "x", "ok", "tab\there", "naïve", "🤰🏽",
    "", "a\\b", "line\nbreak",
];

/// One tweet as segments; `true` marks a gold mention.
pub fn segments() -> impl Strategy<Value = Vec<(String, bool)>> {
    let word = prop_oneof![
        3 => prop::sample::select(WORDS).prop_map(|w| (w.to_string(), false)),
        1 => prop::sample::select(DRUGS).prop_map(|d| (d.to_string(), true)),
        1 => "[a-zA-Z0-9#:,.éü]{1,8}".prop_map(|w| (w, false)),
    ];
    prop::collection::vec(word, 0..10)
}

pub fn build_tweet(id: &str, user: &str, segments: &[(String, bool)]) -> Tweet {
    let mut text = String::new();
    let mut spans = Vec::new();
    for (i, (seg, drug)) in segments.iter().enumerate() {
        if i > 0 {
            text.push(' ');
        }
        let start = text.chars().count();
        text.push_str(seg);
        let end = text.chars().count();
        if *drug && end > start {
            spans.push(Span::from_text(&text, start, end).unwrap());
        }
    }
    Tweet::new(id, user, text, spans).unwrap()
}

/// Datasets of 2..25 tweets with at least two positives.
pub fn datasets() -> impl Strategy<Value = Dataset> {
    (prop::collection::vec(segments(), 2..25), 0usize..4).prop_map(|(mut tweets, users)| {
        for t in tweets.iter_mut().take(2) {
            if !t.iter().any(|(_, d)| *d) {
                t.push(("tylenol".to_string(), true));
            }
        }
        let tweets = tweets
            .iter()
            .enumerate()
            .map(|(i, segs)| build_tweet(&format!("t{i}"), &format!("u{}", i % (users + 1)), segs))
            .collect();
        Dataset::new("gen", tweets).unwrap()
    })
}

/// Validation corpus plus three models' tracks. Models 1 and 2 find most
/// gold mentions with independent misses, boundary slips and false
/// positives; model 3 emits random runs with uniform probabilities.
pub fn three_model_corpus(seed: u64, n: usize) -> (Dataset, Vec<TrackSet<f64>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fillers = ["took", "some", "for", "my", "back", "pain", "today", "ugh", "feeling", "better", "#momlife"];
    let drugs = ["tylenol", "zofran", "advil", "tums", "unisom", "colace"];
    let mut tweets = Vec::new();
    let mut words_per_tweet = Vec::new();
    for i in 0..n {
        let len = rng.random_range(3..9);
        let mut words: Vec<(usize, usize, bool)> = Vec::new();
        let mut text = String::new();
        for w in 0..len {
            if w > 0 {
                text.push(' ');
            }
            let drug = rng.random_bool(0.25);
            let word = if drug {
                drugs[rng.random_range(0..drugs.len())]
            } else {
                fillers[rng.random_range(0..fillers.len())]
            };
            let start = text.chars().count();
            text.push_str(word);
            words.push((start, text.chars().count(), drug));
        }
        let spans = words
            .iter()
            .filter(|w| w.2)
            .map(|&(s, e, _)| Span::from_text(&text, s, e).unwrap())
            .collect();
        tweets.push(Tweet::new(format!("v{i}"), "u", text, spans).unwrap());
        words_per_tweet.push(words);
    }
    let gold = Dataset::new("valid", tweets).unwrap();

    let mut sets = vec![TrackSet::new(), TrackSet::new(), TrackSet::new()];
    for (tweet, words) in gold.tweets().zip(&words_per_tweet) {
        for (m, set) in sets.iter_mut().enumerate().take(2) {
            let mut runs: Vec<Run<f64>> = Vec::new();
            for &(s, e, drug) in words {
                let p = rng.random_range(0.55..0.95);
                if drug {
                    let roll: f64 = rng.random();
                    if roll < 0.15 {
                        continue;
                    }
                    let e = if roll < 0.25 && m == 0 { e - 1 } else { e };
                    runs.push((s, e, p).into());
                } else if rng.random_bool(0.08) {
                    runs.push((s, e, rng.random_range(0.5..0.8)).into());
                }
            }
            set.insert(ProbTrack::new(tweet.id(), tweet.len(), runs).unwrap()).unwrap();
        }
        let mut dense = vec![0.0; tweet.len()];
        for _ in 0..rng.random_range(0..3) {
            let s = rng.random_range(0..tweet.len());
            let e = rng.random_range(s + 1..=tweet.len().min(s + 8));
            let p = 1.0 - rng.random::<f64>();
            dense[s..e].iter_mut().for_each(|x| *x = p);
        }
        sets[2].insert(ProbTrack::from_dense(tweet.id(), &dense)).unwrap();
    }
    (gold, sets)
}

/// Largest number of disjoint (gold, pred) pairs satisfying `related`,
/// by exhaustive search.
pub fn max_matching(gold: &[Span], pred: &[Span], related: &dyn Fn(&Span, &Span) -> bool) -> usize {
    fn go(g: usize, used: &mut Vec<bool>, gold: &[Span], pred: &[Span], related: &dyn Fn(&Span, &Span) -> bool) -> usize {
        if g == gold.len() {
            return 0;
        }
        let mut best = go(g + 1, used, gold, pred, related);
        for p in 0..pred.len() {
            if !used[p] && related(&gold[g], &pred[p]) {
                used[p] = true;
                best = best.max(1 + go(g + 1, used, gold, pred, related));
                used[p] = false;
            }
        }
        best
    }
    go(0, &mut vec![false; pred.len()], gold, pred, related)
}

pub fn exact(a: &Span, b: &Span) -> bool {
    a.start == b.start && a.end == b.end
}

pub fn overlapping(a: &Span, b: &Span) -> bool {
    a.start < b.end && b.start < a.end
}

/// Precision, recall, F1 from counts, with empty-side conventions.
pub fn prf(tp: usize, n_pred: usize, n_gold: usize) -> (f64, f64, f64) {
    let ratio = |num: usize, den: usize, empty: f64| if den == 0 { empty } else { num as f64 / den as f64 };
    let both_empty = n_pred == 0 && n_gold == 0;
    let p = ratio(tp, n_pred, if both_empty { 1.0 } else { 0.0 });
    let r = ratio(tp, n_gold, if both_empty { 1.0 } else { 0.0 });
    let f = if both_empty {
        1.0
    } else if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    };
    (p, r, f)
}

/// Overlapping F1 of the weighted per-character mean at `threshold`,
/// computed densely and scored with [`max_matching`].
pub fn dense_objective(gold: &Dataset, sets: &[TrackSet<f64>], point: &[f64]) -> f64 {
    let (weights, threshold) = point.split_at(sets.len());
    let total: f64 = weights.iter().sum();
    if total == 0.0 {
        return 0.0;
    }
    let (mut tp, mut n_pred, mut n_gold) = (0, 0, 0);
    for tweet in gold.tweets() {
        let dense: Vec<Vec<f64>> = sets.iter().map(|s| s.get(tweet.id()).unwrap().to_dense()).collect();
        let on: Vec<bool> = (0..tweet.len())
            .map(|c| {
                let score: f64 = dense.iter().zip(weights).map(|(d, w)| d[c] * w / total).sum();
                score > 0.0 && score >= threshold[0]
            })
            .collect();
        let mut pred = Vec::new();
        let mut c = 0;
        while c < on.len() {
            if on[c] {
                let s = c;
                while c < on.len() && on[c] {
                    c += 1;
                }
                pred.push(Span::new(s, c).unwrap());
            } else {
                c += 1;
            }
        }
        tp += max_matching(tweet.spans(), &pred, &overlapping);
        n_pred += pred.len();
        n_gold += tweet.spans().len();
    }
    prf(tp, n_pred, n_gold).2
}
