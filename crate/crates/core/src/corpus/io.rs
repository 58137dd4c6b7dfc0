//! JSONL and challenge-style TSV readers/writers.
//!
//! TSV text and drug columns escape `\`, tab, LF and CR as `\\`, `\t`, `\n`
//! and `\r` so that any tweet text survives a round trip.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{CorpusError, Dataset, Span, Tweet};

pub const TSV_HEADER: &str = "tweet_id\tuser_id\ttext\tspan_start\tspan_end\tdrug";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Tsv,
    Jsonl,
}

impl Format {
    /// `.tsv` files are TSV, everything else is JSONL.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("tsv") => Format::Tsv,
            _ => Format::Jsonl,
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "tsv" => Ok(Format::Tsv),
            "jsonl" => Ok(Format::Jsonl),
            other => Err(format!("unknown format {other:?} (expected tsv or jsonl)")),
        }
    }
}

#[derive(Serialize)]
struct RecordOut<'a> {
    id: &'a str,
    user_id: &'a str,
    text: &'a str,
    spans: &'a [Span],
}

#[derive(Deserialize)]
struct RecordIn {
    id: String,
    #[serde(default)]
    user_id: String,
    text: String,
    #[serde(default)]
    spans: Vec<Span>,
}

pub fn parse_dataset(name: &str, input: impl Read, format: Format) -> Result<Dataset, CorpusError> {
    let reader = BufReader::new(input);
    match format {
        Format::Jsonl => parse_jsonl(name, reader),
        Format::Tsv => parse_tsv(name, reader),
    }
}

pub fn serialize_dataset(dataset: &Dataset, format: Format) -> Vec<u8> {
    let mut out = Vec::new();
    match format {
        Format::Jsonl => {
            for tweet in dataset.tweets() {
                let record = RecordOut {
                    id: tweet.id(),
                    user_id: tweet.user_id(),
                    text: tweet.text(),
                    spans: tweet.spans(),
                };
                serde_json::to_writer(&mut out, &record).expect("serializing to memory");
                out.push(b'\n');
            }
        }
        Format::Tsv => {
            out.extend_from_slice(TSV_HEADER.as_bytes());
            out.push(b'\n');
            for tweet in dataset.tweets() {
                let prefix = format!(
                    "{}\t{}\t{}",
                    escape(tweet.id()),
                    escape(tweet.user_id()),
                    escape(tweet.text())
                );
                if tweet.spans().is_empty() {
                    writeln!(out, "{prefix}\t\t\t").expect("writing to memory");
                }
                for span in tweet.spans() {
                    let drug = span.surface.as_deref().map(escape).unwrap_or_default();
                    writeln!(out, "{prefix}\t{}\t{}\t{drug}", span.start, span.end).expect("writing to memory");
                }
            }
        }
    }
    out
}

/// Read a dataset file; the dataset is named after the file stem.
pub fn read_dataset(path: &Path, format: Option<Format>) -> Result<Dataset, CorpusError> {
    let format = format.unwrap_or_else(|| Format::from_path(path));
    let name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("dataset")
        .to_string();
    let file = fs::File::open(path)?;
    parse_dataset(&name, file, format)
}

pub fn write_dataset(path: &Path, dataset: &Dataset, format: Option<Format>) -> Result<(), CorpusError> {
    let format = format.unwrap_or_else(|| Format::from_path(path));
    fs::write(path, serialize_dataset(dataset, format))?;
    Ok(())
}

fn parse_jsonl(name: &str, reader: impl BufRead) -> Result<Dataset, CorpusError> {
    let mut dataset = Dataset::empty(name);
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| CorpusError::Malformed(format!("invalid UTF-8: {e}")).at_line(lineno))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: RecordIn =
            serde_json::from_str(&line).map_err(|e| CorpusError::Malformed(e.to_string()).at_line(lineno))?;
        let tweet = Tweet::new(record.id, record.user_id, record.text, record.spans).map_err(|e| e.at_line(lineno))?;
        dataset.push(tweet).map_err(|e| e.at_line(lineno))?;
    }
    Ok(dataset)
}

struct PendingTweet {
    line: usize,
    id: String,
    user_id: String,
    text: String,
    spans: Vec<Span>,
    negative_row: bool,
}

impl PendingTweet {
    fn finish(self, dataset: &mut Dataset) -> Result<(), CorpusError> {
        let line = self.line;
        let tweet = Tweet::new(self.id, self.user_id, self.text, self.spans).map_err(|e| e.at_line(line))?;
        dataset.push(tweet).map_err(|e| e.at_line(line))
    }
}

fn parse_tsv(name: &str, reader: impl BufRead) -> Result<Dataset, CorpusError> {
    let mut dataset = Dataset::empty(name);
    let mut pending: Option<PendingTweet> = None;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| CorpusError::Malformed(format!("invalid UTF-8: {e}")).at_line(lineno))?;
        if lineno == 1 {
            if line != TSV_HEADER {
                return Err(CorpusError::Malformed(format!("expected header {TSV_HEADER:?}")).at_line(lineno));
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 6 {
            return Err(CorpusError::Malformed(format!("expected 6 columns, found {}", fields.len())).at_line(lineno));
        }
        let malformed = |msg: String| CorpusError::Malformed(msg).at_line(lineno);
        let id = unescape(fields[0]).map_err(malformed)?;
        let user_id = unescape(fields[1]).map_err(malformed)?;
        let text = unescape(fields[2]).map_err(malformed)?;
        let span = match (fields[3], fields[4]) {
            ("", "") => None,
            (s, e) => {
                let start = s.parse::<usize>().map_err(|e| malformed(format!("span_start: {e}")))?;
                let end = e.parse::<usize>().map_err(|e| malformed(format!("span_end: {e}")))?;
                let mut span = Span::new(start, end).map_err(|e| e.at_line(lineno))?;
                if !fields[5].is_empty() {
                    span.surface = Some(unescape(fields[5]).map_err(malformed)?);
                }
                Some(span)
            }
        };

        match pending.as_mut() {
            Some(p) if p.id == id => {
                if p.user_id != user_id || p.text != text {
                    return Err(malformed(format!("rows for tweet {id:?} disagree on user_id/text")));
                }
                if p.negative_row || span.is_none() {
                    return Err(malformed(format!("tweet {id:?} mixes empty and annotated rows")));
                }
                p.spans.extend(span);
            }
            _ => {
                if let Some(done) = pending.take() {
                    done.finish(&mut dataset)?;
                }
                pending = Some(PendingTweet {
                    line: lineno,
                    id,
                    user_id,
                    text,
                    negative_row: span.is_none(),
                    spans: span.into_iter().collect(),
                });
            }
        }
    }
    if let Some(done) = pending.take() {
        done.finish(&mut dataset)?;
    }
    Ok(dataset)
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

fn unescape(s: &str) -> Result<String, String> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            other => return Err(format!("bad escape sequence \\{}", other.map(String::from).unwrap_or_default())),
        }
    }
    Ok(out)
}
