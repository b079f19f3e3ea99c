//! JSON-lines review ingestion and task labels.

use std::fmt;
use std::io::BufRead;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, ParseError, ParseErrorKind, Result};
use crate::fraction::Fraction;

/// One review line: the text and its star rating. Every other field of the
/// source object is discarded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReviewRecord {
    pub text: String,
    pub stars: u8,
    /// 1-based line number in the source file.
    pub source_line: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TaskKind {
    /// Positive iff stars >= 3.
    #[serde(rename = "posneg")]
    PosNeg,
    /// The star rating itself, 1 through 5.
    #[serde(rename = "stars")]
    FiveStar,
}

impl TaskKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::PosNeg => "posneg",
            TaskKind::FiveStar => "stars",
        }
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TaskKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "posneg" | "pos-neg" | "polarity" => Ok(TaskKind::PosNeg),
            "stars" | "five-star" | "5star" => Ok(TaskKind::FiveStar),
            _ => Err(Error::Range(format!("unknown task {s:?} (expected posneg or stars)"))),
        }
    }
}

/// A class label. `Negative < Positive`, and star labels order by rating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Negative,
    Positive,
    Stars(u8),
}

impl Label {
    pub fn task_kind(self) -> TaskKind {
        match self {
            Label::Negative | Label::Positive => TaskKind::PosNeg,
            Label::Stars(_) => TaskKind::FiveStar,
        }
    }

    /// Compact integer code used by the binary model format.
    pub(crate) fn code(self) -> u8 {
        match self {
            Label::Negative => 0,
            Label::Positive => 1,
            Label::Stars(s) => 10 + s,
        }
    }

    pub(crate) fn from_code(code: u8) -> Option<Label> {
        match code {
            0 => Some(Label::Negative),
            1 => Some(Label::Positive),
            11..=15 => Some(Label::Stars(code - 10)),
            _ => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Negative => f.write_str("negative"),
            Label::Positive => f.write_str("positive"),
            Label::Stars(s) => write!(f, "{s}"),
        }
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "negative" => Ok(Label::Negative),
            "positive" => Ok(Label::Positive),
            _ => match s.parse::<u8>() {
                Ok(v @ 1..=5) => Ok(Label::Stars(v)),
                _ => Err(Error::Range(format!("unknown label {s:?}"))),
            },
        }
    }
}

impl Serialize for Label {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Map a star rating onto the label space of `task`.
///
/// Callers guarantee `stars` is in `1..=5`.
pub fn map_label(stars: u8, task: TaskKind) -> Label {
    debug_assert!((1..=5).contains(&stars));
    match task {
        TaskKind::PosNeg if stars >= 3 => Label::Positive,
        TaskKind::PosNeg => Label::Negative,
        TaskKind::FiveStar => Label::Stars(stars),
    }
}

#[derive(Deserialize)]
struct RawReview {
    text: Option<Value>,
    stars: Option<Value>,
}

/// Parse one JSON-lines record (trailing newline already stripped).
pub fn parse_review_line(line: &str, line_number: usize) -> std::result::Result<ReviewRecord, ParseError> {
    let err = |kind, detail: String| ParseError {
        line: line_number,
        kind,
        detail,
    };

    // serde would happily build a struct out of a JSON array.
    if !line.trim_start().starts_with('{') {
        return Err(err(ParseErrorKind::MalformedJson, "not a JSON object".into()));
    }
    let raw: RawReview = serde_json::from_str(line)
        .map_err(|e| err(ParseErrorKind::MalformedJson, e.to_string()))?;

    let text = match raw.text {
        None | Some(Value::Null) => {
            return Err(err(ParseErrorKind::MissingField, "missing `text`".into()))
        }
        Some(Value::String(s)) => s,
        Some(other) => {
            return Err(err(
                ParseErrorKind::MalformedJson,
                format!("`text` is not a string: {other}"),
            ))
        }
    };
    let stars = match raw.stars {
        None | Some(Value::Null) => {
            return Err(err(ParseErrorKind::MissingField, "missing `stars`".into()))
        }
        Some(v) => parse_stars(&v)
            .ok_or_else(|| err(ParseErrorKind::BadStars, format!("`stars` = {v}")))?,
    };

    Ok(ReviewRecord {
        text,
        stars,
        source_line: line_number,
    })
}

fn parse_stars(v: &Value) -> Option<u8> {
    let n = v.as_number()?;
    let stars = if let Some(i) = n.as_i64() {
        i
    } else {
        let f = n.as_f64()?;
        if f.fract() != 0.0 || !f.is_finite() {
            return None;
        }
        f as i64
    };
    (1..=5).contains(&stars).then_some(stars as u8)
}

/// What to do with a line that fails to parse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OnError {
    Skip,
    #[default]
    Abort,
}

impl FromStr for OnError {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "skip" => Ok(OnError::Skip),
            "abort" => Ok(OnError::Abort),
            _ => Err(Error::Range(format!("unknown on-error policy {s:?}"))),
        }
    }
}

/// Records read from a JSON-lines stream, plus the number of lines skipped.
#[derive(Debug, Clone, Default)]
pub struct LoadedRecords {
    pub records: Vec<ReviewRecord>,
    pub skipped: usize,
}

/// Read lines `start_line..=end_line` (1-based) of a JSON-lines stream.
///
/// `end_line = None` reads to the end of the stream.
pub fn load_records<R: BufRead>(
    mut source: R,
    start_line: usize,
    end_line: Option<usize>,
    on_error: OnError,
) -> Result<LoadedRecords> {
    if start_line == 0 {
        return Err(Error::Range("start_line is 1-based".into()));
    }
    if let Some(end) = end_line {
        if start_line > end {
            return Err(Error::Range(format!(
                "start_line {start_line} > end_line {end}"
            )));
        }
    }

    let mut out = LoadedRecords::default();
    let mut buf = Vec::new();
    let mut line_no = 0usize;
    loop {
        if end_line.is_some_and(|end| line_no >= end) {
            break;
        }
        buf.clear();
        if source.read_until(b'\n', &mut buf)? == 0 {
            break;
        }
        line_no += 1;
        if line_no < start_line {
            continue;
        }
        if buf.last() == Some(&b'\n') {
            buf.pop();
            if buf.last() == Some(&b'\r') {
                buf.pop();
            }
        }
        let parsed = match std::str::from_utf8(&buf) {
            Ok(line) => parse_review_line(line, line_no),
            Err(e) => Err(ParseError {
                line: line_no,
                kind: ParseErrorKind::MalformedJson,
                detail: format!("invalid UTF-8: {e}"),
            }),
        };
        match parsed {
            Ok(rec) => out.records.push(rec),
            Err(_) if on_error == OnError::Skip => out.skipped += 1,
            Err(e) => return Err(e.into()),
        }
    }
    Ok(out)
}

/// Two parallel lists, texts and their task labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledCorpus {
    pub texts: Vec<String>,
    pub labels: Vec<Label>,
    pub task_kind: TaskKind,
    /// Source line of each entry.
    pub source_lines: Vec<usize>,
    /// Lines dropped under [`OnError::Skip`].
    pub skipped: usize,
}

impl LabeledCorpus {
    pub fn from_records(records: &[ReviewRecord], task: TaskKind) -> Self {
        LabeledCorpus {
            texts: records.iter().map(|r| r.text.clone()).collect(),
            labels: records.iter().map(|r| map_label(r.stars, task)).collect(),
            task_kind: task,
            source_lines: records.iter().map(|r| r.source_line).collect(),
            skipped: 0,
        }
    }

    /// Build directly from texts and labels. Labels must all belong to `task`.
    pub fn new(texts: Vec<String>, labels: Vec<Label>, task: TaskKind) -> Result<Self> {
        if texts.len() != labels.len() {
            return Err(Error::Range(format!(
                "{} texts but {} labels",
                texts.len(),
                labels.len()
            )));
        }
        if let Some(l) = labels.iter().find(|l| l.task_kind() != task) {
            return Err(Error::Range(format!("label {l} does not belong to task {task}")));
        }
        let n = texts.len();
        Ok(LabeledCorpus {
            texts,
            labels,
            task_kind: task,
            source_lines: (1..=n).collect(),
            skipped: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.texts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.texts.is_empty()
    }

    /// Entries in `range`, preserving order.
    pub fn slice(&self, range: Range<usize>) -> LabeledCorpus {
        LabeledCorpus {
            texts: self.texts[range.clone()].to_vec(),
            labels: self.labels[range.clone()].to_vec(),
            task_kind: self.task_kind,
            source_lines: self.source_lines[range].to_vec(),
            skipped: 0,
        }
    }
}

/// Load lines `start_line..=end_line` of a JSON-lines stream as a labeled corpus.
pub fn load_data<R: BufRead>(
    source: R,
    start_line: usize,
    end_line: usize,
    task: TaskKind,
    on_error: OnError,
) -> Result<LabeledCorpus> {
    let loaded = load_records(source, start_line, Some(end_line), on_error)?;
    let mut corpus = LabeledCorpus::from_records(&loaded.records, task);
    corpus.skipped = loaded.skipped;
    Ok(corpus)
}

/// Split `0..n_records` into a leading training range and a trailing test range
/// at `floor(train_fraction * n_records)`.
pub fn split_contiguous(
    n_records: usize,
    train_fraction: Fraction,
) -> Result<(Range<usize>, Range<usize>)> {
    if n_records < 2 {
        return Err(Error::Range(format!(
            "need at least 2 records to split, have {n_records}"
        )));
    }
    let cut = train_fraction.floor_mul(n_records);
    if cut == 0 || cut == n_records {
        return Err(Error::Range(format!(
            "train fraction {train_fraction} of {n_records} records leaves an empty side"
        )));
    }
    Ok((0..cut, cut..n_records))
}
