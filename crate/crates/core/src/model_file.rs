//! Single-file persistence for [`TrainedPipeline`].
//!
//! Binary layout (all integers and floats little-endian):
//!
//! ```text
//! magic        8 bytes  "RVCLFMDL"
//! version      u32
//! n_sections   u32
//! section*     tag u32 | len u64 | payload[len] | crc32(payload) u32
//! ```
//!
//! Sections, in order: `HEAD` (JSON metadata: task, model kind, stop list id,
//! hyperparameters, creation info), `VOCB` (tokens), `IDFV` (idf weights) and
//! `CLSF` (classifier parameters). A JSON rendering of the same content is
//! available for debugging and is recognised on load.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{Label, TaskKind};
use crate::error::{Error, FormatError, Result};
use crate::features::{IdfVector, Vocabulary};
use crate::models::{
    Classifier, ClassIndex, HyperParams, LinearKind, LinearModel, ModelKind, NbModel,
    TrainedPipeline,
};

pub const MAGIC: &[u8; 8] = b"RVCLFMDL";
pub const FORMAT_VERSION: u32 = 1;

const TAG_HEAD: u32 = u32::from_le_bytes(*b"HEAD");
const TAG_VOCAB: u32 = u32::from_le_bytes(*b"VOCB");
const TAG_IDF: u32 = u32::from_le_bytes(*b"IDFV");
const TAG_CLASSIFIER: u32 = u32::from_le_bytes(*b"CLSF");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ModelFormat {
    #[default]
    Binary,
    Json,
}

impl FromStr for ModelFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bin" | "binary" => Ok(ModelFormat::Binary),
            "json" => Ok(ModelFormat::Json),
            _ => Err(Error::Range(format!("unknown model format {s:?}"))),
        }
    }
}

/// Descriptive fields stored alongside the parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMeta {
    pub format_version: u32,
    pub task_kind: TaskKind,
    pub model_kind: ModelKind,
    pub stop_list_id: String,
    /// Hyperparameters of linear models; `None` for naive Bayes.
    pub hyper: Option<HyperParams>,
    pub created_unix: u64,
    pub tool_version: String,
}

impl ModelMeta {
    fn for_pipeline(p: &TrainedPipeline) -> Self {
        let created_unix = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        ModelMeta {
            format_version: FORMAT_VERSION,
            task_kind: p.task_kind,
            model_kind: p.model_kind(),
            stop_list_id: p.stop_list_id.clone(),
            hyper: match &p.classifier {
                Classifier::Linear(m) => Some(m.hyper.clone()),
                Classifier::NaiveBayes(_) => None,
            },
            created_unix,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct JsonModel {
    meta: ModelMeta,
    pipeline: TrainedPipeline,
}

pub fn encode(p: &TrainedPipeline, format: ModelFormat) -> Result<Vec<u8>> {
    p.validate()?;
    let meta = ModelMeta::for_pipeline(p);
    match format {
        ModelFormat::Json => {
            let doc = JsonModel {
                meta,
                pipeline: p.clone(),
            };
            serde_json::to_vec_pretty(&doc).map_err(|e| Error::Report(e.to_string()))
        }
        ModelFormat::Binary => Ok(encode_binary(p, &meta)),
    }
}

pub fn save_model(p: &TrainedPipeline, path: &Path, format: ModelFormat) -> Result<()> {
    let bytes = encode(p, format)?;
    std::fs::write(path, bytes)?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<TrainedPipeline> {
    decode(&std::fs::read(path)?).map(|(p, _)| p)
}

/// Decode either format, returning the pipeline and its metadata.
pub fn decode(bytes: &[u8]) -> Result<(TrainedPipeline, ModelMeta)> {
    let first = bytes.iter().find(|b| !b.is_ascii_whitespace());
    let (p, meta) = if bytes.starts_with(MAGIC) {
        decode_binary(bytes)?
    } else if MAGIC.starts_with(bytes) && !bytes.is_empty() {
        return Err(FormatError::CorruptSection("truncated header".into()).into());
    } else if first == Some(&b'{') {
        decode_json(bytes)?
    } else {
        return Err(FormatError::BadMagic.into());
    };
    p.validate()
        .map_err(|e| FormatError::CorruptSection(format!("inconsistent model: {e}")))?;
    Ok((p, meta))
}

fn decode_json(bytes: &[u8]) -> Result<(TrainedPipeline, ModelMeta)> {
    let value: serde_json::Value = serde_json::from_slice(bytes)
        .map_err(|e| FormatError::CorruptSection(format!("json: {e}")))?;
    let version = value
        .pointer("/meta/format_version")
        .and_then(|v| v.as_u64())
        .ok_or(FormatError::BadMagic)?;
    if version != FORMAT_VERSION as u64 {
        return Err(FormatError::VersionMismatch {
            found: version.min(u32::MAX as u64) as u32,
            supported: FORMAT_VERSION,
        }
        .into());
    }
    let doc: JsonModel = serde_json::from_value(value)
        .map_err(|e| FormatError::CorruptSection(format!("json: {e}")))?;
    Ok((doc.pipeline, doc.meta))
}

// --- binary encoding ---

#[derive(Default)]
struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64s(&mut self, vs: &[f64]) {
        for v in vs {
            self.0.extend_from_slice(&v.to_le_bytes());
        }
    }
    fn section(&mut self, tag: u32, payload: &[u8]) {
        self.u32(tag);
        self.u64(payload.len() as u64);
        self.0.extend_from_slice(payload);
        self.u32(crc32fast::hash(payload));
    }
}

fn encode_binary(p: &TrainedPipeline, meta: &ModelMeta) -> Vec<u8> {
    let head = serde_json::to_vec(meta).expect("metadata serializes");

    let mut vocab = Writer::default();
    vocab.u64(p.vocabulary.len() as u64);
    for t in p.vocabulary.tokens() {
        vocab.u32(t.len() as u32);
        vocab.0.extend_from_slice(t.as_bytes());
    }

    let mut idf = Writer::default();
    idf.u64(p.idf.n_docs_fitted as u64);
    idf.u64(p.idf.len() as u64);
    idf.f64s(&p.idf.idf);

    let mut clf = Writer::default();
    let ci = p.classifier.class_index();
    clf.u8(match p.model_kind() {
        ModelKind::NaiveBayes => 0,
        ModelKind::Svm => 1,
        ModelKind::LogisticRegression => 2,
    });
    clf.u32(ci.len() as u32);
    for l in ci.classes() {
        clf.u8(l.code());
    }
    clf.u64(p.classifier.n_features() as u64);
    match &p.classifier {
        Classifier::NaiveBayes(m) => {
            clf.f64s(&[m.alpha]);
            clf.f64s(&m.log_prior);
            clf.f64s(&m.log_likelihood);
        }
        Classifier::Linear(m) => {
            clf.u8(m.converged as u8);
            clf.u64(m.iterations as u64);
            clf.u32(m.n_score_rows() as u32);
            clf.f64s(&m.weights);
            clf.f64s(&m.bias);
        }
    }

    let mut out = Writer::default();
    out.0.extend_from_slice(MAGIC);
    out.u32(FORMAT_VERSION);
    out.u32(4);
    out.section(TAG_HEAD, &head);
    out.section(TAG_VOCAB, &vocab.0);
    out.section(TAG_IDF, &idf.0);
    out.section(TAG_CLASSIFIER, &clf.0);
    out.0
}

struct Reader<'a> {
    buf: &'a [u8],
    what: &'static str,
}

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8], what: &'static str) -> Self {
        Reader { buf, what }
    }

    fn corrupt(&self, msg: &str) -> Error {
        FormatError::CorruptSection(format!("{}: {msg}", self.what)).into()
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.buf.len() < n {
            return Err(self.corrupt("unexpected end of data"));
        }
        let (head, rest) = self.buf.split_at(n);
        self.buf = rest;
        Ok(head)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn len(&mut self) -> Result<usize> {
        let v = self.u64()?;
        usize::try_from(v).map_err(|_| self.corrupt("length overflow"))
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        let bytes = n
            .checked_mul(8)
            .ok_or_else(|| self.corrupt("length overflow"))?;
        Ok(self
            .take(bytes)?
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    fn finish(&self) -> Result<()> {
        if self.buf.is_empty() {
            Ok(())
        } else {
            Err(self.corrupt("trailing bytes"))
        }
    }
}

fn decode_binary(bytes: &[u8]) -> Result<(TrainedPipeline, ModelMeta)> {
    let mut r = Reader::new(&bytes[MAGIC.len()..], "header");
    let version = r.u32()?;
    if version != FORMAT_VERSION {
        return Err(FormatError::VersionMismatch {
            found: version,
            supported: FORMAT_VERSION,
        }
        .into());
    }
    let n_sections = r.u32()?;
    let mut sections = Vec::with_capacity(4);
    for _ in 0..n_sections {
        let tag = r.u32()?;
        let len = r.len()?;
        let payload = r.take(len)?;
        let crc = r.u32()?;
        if crc != crc32fast::hash(payload) {
            return Err(FormatError::CorruptSection(format!(
                "checksum mismatch in section {:?}",
                String::from_utf8_lossy(&tag.to_le_bytes())
            ))
            .into());
        }
        sections.push((tag, payload));
    }
    r.finish()?;

    let find = |tag: u32, name: &str| {
        sections
            .iter()
            .find(|(t, _)| *t == tag)
            .map(|(_, p)| *p)
            .ok_or_else(|| Error::from(FormatError::CorruptSection(format!("missing {name} section"))))
    };

    let meta: ModelMeta = serde_json::from_slice(find(TAG_HEAD, "HEAD")?)
        .map_err(|e| FormatError::CorruptSection(format!("HEAD: {e}")))?;

    let mut r = Reader::new(find(TAG_VOCAB, "VOCB")?, "VOCB");
    let n_tokens = r.len()?;
    let mut tokens = Vec::with_capacity(n_tokens.min(1 << 20));
    for _ in 0..n_tokens {
        let len = r.u32()? as usize;
        let raw = r.take(len)?;
        let t = std::str::from_utf8(raw).map_err(|_| r.corrupt("token is not UTF-8"))?;
        tokens.push(t.to_string());
    }
    r.finish()?;
    let vocabulary = Vocabulary::from_sorted(tokens)
        .map_err(|_| FormatError::CorruptSection("VOCB: tokens out of order".into()))?;

    let mut r = Reader::new(find(TAG_IDF, "IDFV")?, "IDFV");
    let n_docs_fitted = r.len()?;
    let n = r.len()?;
    let idf = IdfVector {
        idf: r.f64s(n)?,
        n_docs_fitted,
    };
    r.finish()?;

    let mut r = Reader::new(find(TAG_CLASSIFIER, "CLSF")?, "CLSF");
    let kind = r.u8()?;
    let k = r.u32()? as usize;
    let mut classes = Vec::with_capacity(k.min(16));
    for _ in 0..k {
        let code = r.u8()?;
        classes.push(Label::from_code(code).ok_or_else(|| r.corrupt("unknown label code"))?);
    }
    let class_index =
        ClassIndex::from_sorted(classes).map_err(|_| r.corrupt("classes out of order"))?;
    let v = r.len()?;
    let classifier = match kind {
        0 => {
            let alpha = r.f64s(1)?[0];
            let log_prior = r.f64s(k)?;
            let log_likelihood = r.f64s(k.checked_mul(v).ok_or_else(|| r.corrupt("size overflow"))?)?;
            Classifier::NaiveBayes(NbModel {
                log_prior,
                log_likelihood,
                n_features: v,
                alpha,
                class_index,
            })
        }
        1 | 2 => {
            let converged = r.u8()? != 0;
            let iterations = r.len()?;
            let rows = r.u32()? as usize;
            let weights = r.f64s(rows.checked_mul(v).ok_or_else(|| r.corrupt("size overflow"))?)?;
            let bias = r.f64s(rows)?;
            let hyper = meta
                .hyper
                .clone()
                .ok_or_else(|| r.corrupt("linear model without hyperparameters"))?;
            Classifier::Linear(LinearModel {
                kind: if kind == 1 {
                    LinearKind::HingeSvm
                } else {
                    LinearKind::LogisticRegression
                },
                weights,
                bias,
                n_features: v,
                hyper,
                class_index,
                converged,
                iterations,
            })
        }
        _ => return Err(r.corrupt("unknown classifier kind")),
    };
    r.finish()?;

    if classifier.model_kind() != meta.model_kind {
        return Err(FormatError::CorruptSection("HEAD/CLSF model kind disagree".into()).into());
    }

    Ok((
        TrainedPipeline {
            task_kind: meta.task_kind,
            stop_list_id: meta.stop_list_id.clone(),
            vocabulary,
            idf,
            classifier,
        },
        meta,
    ))
}
