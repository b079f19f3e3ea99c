//! In-browser demo: inspect tokenization, train a classifier on pasted
//! JSON-lines reviews, and score new text against it.
//!
//! Every operation returns a JSON string so the page needs no glue types.
//! The plain-Rust [`Session`] holds the logic and is what the tests exercise;
//! [`Demo`] is its `wasm_bindgen` face. Nothing here reads the clock, which
//! is unavailable on `wasm32-unknown-unknown`.

use reviewclf::corpus::{load_records, split_contiguous, OnError};
use reviewclf::eval::{accuracy, confusion_matrix, task_classes};
use reviewclf::models::{pipeline_fit, pipeline_predict, Classifier, HyperParams, LinearKind, ModelKind};
use reviewclf::textproc::{normalize, tokenize, StopList};
use reviewclf::{Fraction, Label, LabeledCorpus, TaskKind, TrainedPipeline};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// 250 short restaurant reviews used to prefill the page.
pub const SAMPLE_REVIEWS: &str = include_str!("../data/sample.jsonl");

#[derive(Serialize)]
struct TokenView {
    token: String,
    stop_word: bool,
    /// `None` until a model exists.
    in_vocabulary: Option<bool>,
}

#[derive(Serialize)]
struct Analysis {
    normalized: String,
    tokens: Vec<TokenView>,
}

#[derive(Serialize)]
pub struct TrainSummary {
    pub task: TaskKind,
    pub model: ModelKind,
    pub n_train: usize,
    pub n_test: usize,
    pub skipped: usize,
    pub accuracy: f64,
    pub train_accuracy: f64,
    pub classes: Vec<Label>,
    pub confusion: Vec<Vec<u64>>,
    pub vocabulary_size: usize,
    pub converged: bool,
}

#[derive(Serialize)]
struct Prediction {
    label: Label,
    classes: Vec<Label>,
    /// Probabilities for nb and lr, margins for svm.
    scores: Vec<f64>,
    score_kind: &'static str,
}

pub struct Session {
    stoplist: StopList,
    pipeline: Option<TrainedPipeline>,
}

impl Session {
    pub fn new() -> Self {
        Session {
            stoplist: StopList::english(),
            pipeline: None,
        }
    }

    /// Tokens of `text` after lowercasing, flagged as stop word and, once a
    /// model is trained, as known to its vocabulary.
    pub fn analyze(&self, text: &str) -> String {
        let normalized = normalize(text);
        let tokens = tokenize(&normalized)
            .into_iter()
            .map(|token| TokenView {
                stop_word: self.stoplist.contains(&token),
                in_vocabulary: self.pipeline.as_ref().map(|p| p.vocabulary.id(&token).is_some()),
                token,
            })
            .collect();
        to_json(&Analysis { normalized, tokens })
    }

    /// Fit on the leading `train_fraction` of `jsonl` and score the rest.
    /// Malformed lines are skipped and counted.
    pub fn train(&mut self, jsonl: &str, task: &str, model: &str, train_fraction: &str) -> Result<String, String> {
        let task: TaskKind = task.parse().map_err(err)?;
        let model: ModelKind = model.parse().map_err(err)?;
        let tf: Fraction = train_fraction.parse().map_err(err)?;
        let loaded = load_records(jsonl.as_bytes(), 1, None, OnError::Skip).map_err(err)?;
        let corpus = LabeledCorpus::from_records(&loaded.records, task);
        let (tr, te) = split_contiguous(corpus.len(), tf).map_err(err)?;
        let (train, test) = (corpus.slice(tr), corpus.slice(te));

        let p = pipeline_fit(&train, model, &HyperParams::default(), &self.stoplist).map_err(err)?;
        let predicted = pipeline_predict(&p, &test.texts);
        let classes = task_classes(task);
        let summary = TrainSummary {
            task,
            model,
            n_train: train.len(),
            n_test: test.len(),
            skipped: loaded.skipped,
            accuracy: accuracy(&predicted, &test.labels).map_err(err)?,
            train_accuracy: accuracy(&pipeline_predict(&p, &train.texts), &train.labels).map_err(err)?,
            confusion: confusion_matrix(&predicted, &test.labels, &classes).map_err(err)?,
            classes,
            vocabulary_size: p.vocabulary.len(),
            converged: match &p.classifier {
                Classifier::Linear(m) => m.converged,
                Classifier::NaiveBayes(_) => true,
            },
        };
        self.pipeline = Some(p);
        Ok(to_json(&summary))
    }

    /// Label and per-class scores for one text under the last trained model.
    pub fn predict(&self, text: &str) -> Result<String, String> {
        let p = self.pipeline.as_ref().ok_or("train a model first")?;
        let label = pipeline_predict(p, &[text])[0];
        let classes = p.classifier.class_index().classes().to_vec();
        let mut scores = p.class_scores(&[text]).remove(0);
        let score_kind = match &p.classifier {
            Classifier::Linear(m) if m.kind == LinearKind::HingeSvm => {
                // Two classes share one margin; show it from both sides.
                if scores.len() == 1 && classes.len() == 2 {
                    scores = vec![-scores[0], scores[0]];
                }
                "margin"
            }
            _ => "probability",
        };
        Ok(to_json(&Prediction {
            label,
            classes,
            scores,
            score_kind,
        }))
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("plain data serializes")
}

#[wasm_bindgen]
pub struct Demo {
    session: Session,
}

#[wasm_bindgen]
impl Demo {
    #[wasm_bindgen(constructor)]
    pub fn new() -> Demo {
        Demo { session: Session::new() }
    }

    #[wasm_bindgen(js_name = sampleReviews)]
    pub fn sample_reviews() -> String {
        SAMPLE_REVIEWS.to_string()
    }

    pub fn analyze(&self, text: &str) -> String {
        self.session.analyze(text)
    }

    pub fn train(&mut self, jsonl: &str, task: &str, model: &str, train_fraction: &str) -> Result<String, JsError> {
        self.session
            .train(jsonl, task, model, train_fraction)
            .map_err(|e| JsError::new(&e))
    }

    pub fn predict(&self, text: &str) -> Result<String, JsError> {
        self.session.predict(text).map_err(|e| JsError::new(&e))
    }
}

impl Default for Session {
    fn default() -> Self {
        Session::new()
    }
}

impl Default for Demo {
    fn default() -> Self {
        Demo::new()
    }
}
