//! Toolkit for extracting medication mentions from tweets.
//!
//! Annotated corpora live in [`corpus`]; [`augment`] and [`sampling`] prepare
//! training data; models (the built-in [`tagger`] or any external model that
//! emits the prediction file format) produce per-character probability tracks
//! which [`ensemble`] combines and [`postprocess`] cleans up. [`eval`] scores
//! span predictions, [`hpo`] tunes ensemble weights and threshold, and
//! [`pipeline`] chains everything together.
//!
//! Numeric code is generic over [`num::Scalar`]; the aliases below fix it to
//! `f64`, which is what the file formats and the command line use.

pub mod augment;
pub mod corpus;
pub mod ensemble;
pub mod eval;
pub mod hpo;
pub mod lexicon;
pub mod num;
pub mod pipeline;
pub mod postprocess;
pub mod rng;
pub mod sampling;
pub mod tagger;

pub use corpus::{CorpusError, Dataset, Format, Span, Tweet};
pub use lexicon::Lexicon;
pub use num::{Ratio, Scalar};

pub type CharProbTrack = tagger::ProbTrack<f64>;
pub type CharProbTrack32 = tagger::ProbTrack<f32>;
pub type PredictionSet = tagger::TrackSet<f64>;
pub type GazetteerConfig = tagger::GazetteerConfig<f64>;
pub type EnsembleParams = ensemble::Params<f64>;
pub type MetricsReport = eval::Report<f64>;
/// Metrics as exact fractions of span counts.
pub type ExactMetricsReport = eval::Report<num_rational::Ratio<u64>>;
pub type TrialRecord = hpo::TrialRecord<f64>;
pub type SearchSpace = hpo::SearchSpace<f64>;
