//! Classifiers over tf-idf rows and the fitted text pipeline.

mod linear;
mod logistic;
mod naive_bayes;
mod pipeline;
mod svm;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::Label;
use crate::error::{Degenerate, Error, Result};

pub use linear::{linear_predict, LinearKind, LinearModel};
pub use logistic::{lr_fit, lr_fit_traced, softmax_objective, LrTrace};
pub use naive_bayes::{nb_fit, nb_predict, NbModel};
pub use pipeline::{pipeline_fit, pipeline_predict, Classifier, TrainedPipeline};
pub use svm::svm_fit;

/// Sorted distinct labels; a label's position is its class index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassIndex {
    classes: Vec<Label>,
}

impl ClassIndex {
    pub fn from_labels(labels: &[Label]) -> Self {
        let mut classes = labels.to_vec();
        classes.sort_unstable();
        classes.dedup();
        ClassIndex { classes }
    }

    /// Classes must be strictly ascending.
    pub fn from_sorted(classes: Vec<Label>) -> Result<Self> {
        if classes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Range("class list must be strictly ascending".into()));
        }
        Ok(ClassIndex { classes })
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn classes(&self) -> &[Label] {
        &self.classes
    }

    pub fn index_of(&self, label: Label) -> Option<usize> {
        self.classes.binary_search(&label).ok()
    }

    pub fn label(&self, index: usize) -> Label {
        self.classes[index]
    }

    /// Map labels to class indices, failing on a label outside the index.
    pub fn encode(&self, labels: &[Label]) -> Result<Vec<usize>> {
        labels
            .iter()
            .map(|&l| {
                self.index_of(l)
                    .ok_or_else(|| Error::Range(format!("label {l} not in class index")))
            })
            .collect()
    }
}

/// Class index for a training label vector with at least two classes.
pub(crate) fn training_classes(labels: &[Label]) -> Result<ClassIndex> {
    if labels.is_empty() {
        return Err(Error::DegenerateInput(Degenerate::NoRecords));
    }
    let ci = ClassIndex::from_labels(labels);
    if ci.len() < 2 {
        return Err(Error::DegenerateInput(Degenerate::SingleClass));
    }
    Ok(ci)
}

/// Index of the maximum score; ties go to the smaller index.
pub(crate) fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (c, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = c;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    #[serde(rename = "nb")]
    NaiveBayes,
    #[serde(rename = "svm")]
    Svm,
    #[serde(rename = "lr")]
    LogisticRegression,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [
        ModelKind::NaiveBayes,
        ModelKind::Svm,
        ModelKind::LogisticRegression,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::NaiveBayes => "nb",
            ModelKind::Svm => "svm",
            ModelKind::LogisticRegression => "lr",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nb" => Ok(ModelKind::NaiveBayes),
            "svm" => Ok(ModelKind::Svm),
            "lr" => Ok(ModelKind::LogisticRegression),
            _ => Err(Error::Range(format!(
                "unknown model {s:?} (expected nb, svm or lr)"
            ))),
        }
    }
}

/// Step size schedule for SGD.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearningRate {
    /// `eta_t = 1 / (l2 * (t0 + t))`; `t0 = None` picks `1 / l2`, which
    /// makes the first step exactly 1.
    InverseScaling { t0: Option<f64> },
}

impl Default for LearningRate {
    fn default() -> Self {
        LearningRate::InverseScaling { t0: None }
    }
}

/// Training settings shared by all three models. Each model reads the fields
/// it needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperParams {
    /// Additive smoothing for naive Bayes.
    pub nb_alpha: f64,
    /// L2 penalty. `None` selects the model default: `1e-4` for the SVM and
    /// `1e-4 * n_train` for logistic regression, whose loss is summed.
    pub l2_strength: Option<f64>,
    pub epochs: usize,
    pub seed: u64,
    pub learning_rate: LearningRate,
    /// Logistic regression stops once the gradient's max-norm falls below this.
    pub tolerance: f64,
    pub max_iter: usize,
}

impl Default for HyperParams {
    fn default() -> Self {
        HyperParams {
            nb_alpha: 1.0,
            l2_strength: None,
            epochs: 5,
            seed: 42,
            learning_rate: LearningRate::default(),
            tolerance: 1e-6,
            max_iter: 1000,
        }
    }
}

impl HyperParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidHyperParams(m));
        if !(self.nb_alpha > 0.0 && self.nb_alpha.is_finite()) {
            return bad(format!("nb_alpha must be > 0, got {}", self.nb_alpha));
        }
        if let Some(l2) = self.l2_strength {
            if !(l2 >= 0.0 && l2.is_finite()) {
                return bad(format!("l2_strength must be >= 0, got {l2}"));
            }
        }
        if self.epochs == 0 {
            return bad("epochs must be >= 1".into());
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return bad(format!("tolerance must be > 0, got {}", self.tolerance));
        }
        if self.max_iter == 0 {
            return bad("max_iter must be >= 1".into());
        }
        let LearningRate::InverseScaling { t0 } = self.learning_rate;
        if let Some(t0) = t0 {
            if !(t0 > 0.0 && t0.is_finite()) {
                return bad(format!("t0 must be > 0, got {t0}"));
            }
        }
        Ok(())
    }

    pub fn svm_l2(&self) -> f64 {
        self.l2_strength.unwrap_or(1e-4)
    }

    pub fn lr_l2(&self, n_train: usize) -> f64 {
        self.l2_strength.unwrap_or(1e-4 * n_train as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_index_orders_labels() {
        let ci = ClassIndex::from_labels(&[Label::Positive, Label::Negative, Label::Positive]);
        assert_eq!(ci.classes(), &[Label::Negative, Label::Positive]);
        let ci = ClassIndex::from_labels(&[Label::Stars(4), Label::Stars(1), Label::Stars(2)]);
        assert_eq!(ci.index_of(Label::Stars(4)), Some(2));
        assert_eq!(ci.index_of(Label::Stars(3)), None);
        assert!(ClassIndex::from_sorted(vec![Label::Stars(2), Label::Stars(1)]).is_err());
    }

    #[test]
    fn argmax_breaks_ties_low() {
        assert_eq!(argmax(&[0.0, 0.0, 0.0]), 0);
        assert_eq!(argmax(&[1.0, 3.0, 3.0]), 1);
        assert_eq!(argmax(&[-1.0, -2.0]), 0);
    }

    #[test]
    fn hyper_validation() {
        assert!(HyperParams::default().validate().is_ok());
        let bad = [
            HyperParams { nb_alpha: 0.0, ..Default::default() },
            HyperParams { l2_strength: Some(-1.0), ..Default::default() },
            HyperParams { epochs: 0, ..Default::default() },
            HyperParams { tolerance: 0.0, ..Default::default() },
            HyperParams { max_iter: 0, ..Default::default() },
        ];
        for h in bad {
            assert!(matches!(h.validate(), Err(Error::InvalidHyperParams(_))));
        }
        assert_eq!(HyperParams::default().lr_l2(500), 0.05);
    }
}
