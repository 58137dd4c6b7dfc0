//! Per-character drug probabilities: the track type, the prediction file
//! contract and the built-in gazetteer tagger.

mod gazetteer;
mod track;

pub use gazetteer::{tag, tag_dataset, within_one_edit, Gazetteer, GazetteerConfig, GazetteerError, FUZZY_MIN_LEN};
pub use track::{parse_tracks, read_tracks, serialize_tracks, write_tracks, ProbTrack, Run, TrackError, TrackSet};
