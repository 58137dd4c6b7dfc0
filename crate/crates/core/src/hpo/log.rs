//! JSONL trial log: one `{"index", "params", "objective"}` object per line.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::{HpoError, TrialRecord};
use crate::num::Scalar;

pub fn serialize_trial<T: Scalar>(trial: &TrialRecord<T>) -> String {
    serde_json::to_string(trial).expect("serializing trial")
}

pub fn parse_trial_log<T: Scalar>(input: impl Read) -> Result<Vec<TrialRecord<T>>, HpoError> {
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(input).lines().enumerate() {
        let line = line.map_err(|e| HpoError::Log(format!("line {}: {e}", idx + 1)))?;
        if line.trim().is_empty() {
            continue;
        }
        let trial: TrialRecord<T> =
            serde_json::from_str(&line).map_err(|e| HpoError::Log(format!("line {}: {e}", idx + 1)))?;
        out.push(trial);
    }
    Ok(out)
}

/// Reads a log; a missing file is an empty history.
pub fn read_trial_log<T: Scalar>(path: &Path) -> Result<Vec<TrialRecord<T>>, HpoError> {
    match File::open(path) {
        Ok(f) => parse_trial_log(f),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Vec::new()),
        Err(e) => Err(HpoError::Log(format!("{}: {e}", path.display()))),
    }
}

/// Appends trials to a log file as they complete.
pub struct TrialLogWriter {
    file: File,
}

impl TrialLogWriter {
    /// Opens `path` for appending; with `truncate` the file starts empty.
    pub fn open(path: &Path, truncate: bool) -> Result<Self, HpoError> {
        let mut opts = OpenOptions::new();
        opts.create(true);
        if truncate {
            opts.write(true).truncate(true);
        } else {
            opts.append(true);
        }
        let file = opts
            .open(path)
            .map_err(|e| HpoError::Log(format!("{}: {e}", path.display())))?;
        Ok(TrialLogWriter { file })
    }

    pub fn append<T: Scalar>(&mut self, trial: &TrialRecord<T>) -> Result<(), HpoError> {
        writeln!(self.file, "{}", serialize_trial(trial)).map_err(|e| HpoError::Log(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hpo::{Method, Optimizer, SearchSpace, TpeConfig};

    #[test]
    fn log_round_trip_and_resume() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trials.jsonl");
        assert!(read_trial_log::<f64>(&path).unwrap().is_empty());

        let space = SearchSpace::<f64>::ensemble(1).unwrap();
        let f = |p: &[f64]| -> Result<f64, crate::hpo::BoxError> { Ok(p[0] * p[1]) };
        let opt = Optimizer { space, method: Method::Tpe(TpeConfig::default()), budget: 8, seed: 2 };
        let mut writer = TrialLogWriter::open(&path, true).unwrap();
        let first = Optimizer { budget: 5, ..opt.clone() }
            .resume(&f, vec![], |t| writer.append(t))
            .unwrap();
        drop(writer);
        let logged = read_trial_log::<f64>(&path).unwrap();
        assert_eq!(logged, first.history);

        let mut writer = TrialLogWriter::open(&path, false).unwrap();
        let resumed = opt.resume(&f, logged, |t| writer.append(t)).unwrap();
        assert_eq!(resumed, opt.run(&f).unwrap());
        assert_eq!(read_trial_log::<f64>(&path).unwrap(), resumed.history);
        assert_eq!(serialize_trial(&resumed.history[0]).matches("index").count(), 1);

        assert!(parse_trial_log::<f64>("{bad".as_bytes()).is_err());
    }
}
