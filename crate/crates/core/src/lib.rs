//! Text classification for star-rated reviews.
//!
//! The crate covers the full path from a JSON-lines review dump to a trained
//! classifier and its evaluation:
//!
//! - [`corpus`]: JSON-lines parsing, star → label mapping, line-range loading
//!   and contiguous train/test splitting.
//! - [`textproc`]: lowercasing, alphanumeric tokenization and stop-word removal.
//! - [`features`]: vocabulary, sparse count matrix and tf-idf weighting.
//! - [`models`]: multinomial naive Bayes, SGD hinge-loss SVM, softmax logistic
//!   regression and the fitted [`models::TrainedPipeline`].
//! - [`eval`]: accuracy, confusion matrices, timed experiments and data-fraction
//!   sweeps.
//! - [`model_file`] and [`report`]: model persistence and report output.

pub mod corpus;
pub mod error;
pub mod eval;
pub mod features;
pub mod fraction;
pub mod model_file;
pub mod models;
pub mod report;
pub mod textproc;

pub use corpus::{Label, LabeledCorpus, ReviewRecord, TaskKind};
pub use error::{Error, Result};
pub use fraction::Fraction;
pub use models::{HyperParams, ModelKind, TrainedPipeline};
