//! External paraphrase hook.
//!
//! Positive tweets go to the command's stdin as JSONL `{id, text}` records;
//! the command answers with `{id, paraphrases: [..]}` records on stdout. A
//! paraphrase is kept only when every original drug surface can be found in
//! it verbatim, searching left to right from the end of the previous match.

use std::collections::HashMap;
use std::io::Write;
use std::process::{Command, Stdio};
use std::thread;

use log::warn;
use serde::{Deserialize, Serialize};

use super::AugmentError;
use crate::corpus::{char_len, Dataset, Span, Tweet};

#[derive(Serialize)]
struct Request<'a> {
    id: &'a str,
    text: &'a str,
}

#[derive(Deserialize)]
struct Response {
    id: String,
    paraphrases: Vec<String>,
}

#[derive(Debug, Clone, Default)]
pub struct Paraphrased {
    pub tweets: Vec<Tweet>,
    /// Paraphrases rejected because a drug surface was missing.
    pub dropped: usize,
}

/// Locates each surface of `original` in `text`, in order. `None` when any
/// surface is missing.
pub fn relocate_spans(original: &Tweet, text: &str) -> Option<Vec<Span>> {
    let mut spans = Vec::with_capacity(original.spans().len());
    let mut byte_cursor = 0;
    let mut char_cursor = 0;
    for span in original.spans() {
        let surface = original.surface(span);
        let found = text[byte_cursor..].find(surface)?;
        let start = char_cursor + char_len(&text[byte_cursor..byte_cursor + found]);
        let end = start + char_len(surface);
        spans.push(Span::with_surface(start, end, surface).ok()?);
        byte_cursor += found + surface.len();
        char_cursor = end;
    }
    Some(spans)
}

/// Runs `command` (via `sh -c`) over the positive tweets of `dataset`.
/// Accepted paraphrases get ids `<id>#para<j>`.
pub fn paraphrase(dataset: &Dataset, command: &str) -> Result<Paraphrased, AugmentError> {
    let positives: Vec<&Tweet> = dataset.tweets().filter(|t| t.is_positive()).collect();
    let mut input = Vec::new();
    for tweet in &positives {
        serde_json::to_writer(&mut input, &Request { id: tweet.id(), text: tweet.text() })
            .expect("serializing to memory");
        input.push(b'\n');
    }

    let mut child = Command::new("sh")
        .arg("-c")
        .arg(command)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| AugmentError::CommandLaunch(e.to_string()))?;
    let mut stdin = child.stdin.take().expect("stdin is piped");
    // write from a separate thread so a chatty command cannot deadlock on a full stdout pipe
    let writer = thread::spawn(move || stdin.write_all(&input));
    let output = child
        .wait_with_output()
        .map_err(|e| AugmentError::CommandLaunch(e.to_string()))?;
    let write_result = writer.join().expect("stdin writer panicked");
    if !output.status.success() {
        return Err(AugmentError::CommandFailed {
            status: output.status.to_string(),
            stderr: String::from_utf8_lossy(&output.stderr).trim().to_string(),
        });
    }
    if let Err(e) = write_result {
        return Err(AugmentError::CommandFailed {
            status: "broken stdin".to_string(),
            stderr: e.to_string(),
        });
    }
    let stdout = String::from_utf8(output.stdout).map_err(|e| AugmentError::MalformedOutput {
        line: 0,
        message: format!("invalid UTF-8: {e}"),
    })?;

    let by_id: HashMap<&str, &Tweet> = positives.iter().map(|t| (t.id(), *t)).collect();
    let mut result = Paraphrased::default();
    let mut counters: HashMap<String, usize> = HashMap::new();
    for (idx, line) in stdout.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let malformed = |message: String| AugmentError::MalformedOutput { line: idx + 1, message };
        let response: Response = serde_json::from_str(line).map_err(|e| malformed(e.to_string()))?;
        let original = by_id
            .get(response.id.as_str())
            .ok_or_else(|| malformed(format!("unknown tweet id {:?}", response.id)))?;
        for text in response.paraphrases {
            match relocate_spans(original, &text) {
                Some(spans) => {
                    let j = counters.entry(response.id.clone()).or_insert(0);
                    let id = format!("{}#para{j}", response.id);
                    *j += 1;
                    result.tweets.push(Tweet::new(id, original.user_id(), text, spans)?);
                }
                None => result.dropped += 1,
            }
        }
    }
    if result.dropped > 0 {
        warn!("paraphrase: dropped {} paraphrases missing a drug surface", result.dropped);
    }
    Ok(result)
}
