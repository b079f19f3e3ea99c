use serde::{Deserialize, Serialize};

use super::{
    linear_predict, lr_fit, nb_fit, nb_predict, svm_fit, training_classes, ClassIndex,
    HyperParams, LinearKind, LinearModel, ModelKind, NbModel,
};
use crate::corpus::{Label, LabeledCorpus, TaskKind};
use crate::error::{Degenerate, Error, Result};
use crate::features::{
    count_transform, fit_idf, fit_vocabulary, tfidf_transform, IdfVector, Vocabulary,
    WeightMatrix,
};
use crate::textproc::{analyze, normalize, tokenize, StopList};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Classifier {
    NaiveBayes(NbModel),
    Linear(LinearModel),
}

impl Classifier {
    pub fn model_kind(&self) -> ModelKind {
        match self {
            Classifier::NaiveBayes(_) => ModelKind::NaiveBayes,
            Classifier::Linear(m) => match m.kind {
                LinearKind::HingeSvm => ModelKind::Svm,
                LinearKind::LogisticRegression => ModelKind::LogisticRegression,
            },
        }
    }

    pub fn class_index(&self) -> &ClassIndex {
        match self {
            Classifier::NaiveBayes(m) => &m.class_index,
            Classifier::Linear(m) => &m.class_index,
        }
    }

    pub fn n_features(&self) -> usize {
        match self {
            Classifier::NaiveBayes(m) => m.n_features,
            Classifier::Linear(m) => m.n_features,
        }
    }

    pub fn predict(&self, x: &WeightMatrix) -> Result<Vec<Label>> {
        match self {
            Classifier::NaiveBayes(m) => nb_predict(m, x),
            Classifier::Linear(m) => linear_predict(m, x),
        }
    }
}

/// Fitted vocabulary, idf weights and classifier, applied as one unit.
///
/// Stop words never enter the vocabulary, so prediction needs only the
/// vocabulary: a stop word at prediction time is dropped like any other
/// unknown token. The stop list is kept by id for provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedPipeline {
    pub task_kind: TaskKind,
    pub stop_list_id: String,
    pub vocabulary: Vocabulary,
    pub idf: IdfVector,
    pub classifier: Classifier,
}

impl TrainedPipeline {
    pub fn model_kind(&self) -> ModelKind {
        self.classifier.model_kind()
    }

    /// Check that vocabulary, idf and classifier agree on dimensions.
    pub fn validate(&self) -> Result<()> {
        let v = self.vocabulary.len();
        for found in [self.idf.len(), self.classifier.n_features()] {
            if found != v {
                return Err(Error::DimensionMismatch { expected: v, found });
            }
        }
        if let Some(l) = self
            .classifier
            .class_index()
            .classes()
            .iter()
            .find(|l| l.task_kind() != self.task_kind)
        {
            return Err(Error::Range(format!(
                "class {l} does not belong to task {}",
                self.task_kind
            )));
        }
        Ok(())
    }

    /// tf-idf rows for `texts` under the frozen vocabulary and idf.
    pub fn transform<S: AsRef<str>>(&self, texts: &[S]) -> WeightMatrix {
        let tokens: Vec<Vec<String>> = texts
            .iter()
            .map(|t| tokenize(&normalize(t.as_ref())))
            .collect();
        let counts = count_transform(&tokens, &self.vocabulary);
        tfidf_transform(&counts, &self.idf).expect("pipeline dimensions validated at fit/load")
    }

    /// Per-class scores for each text: posterior probabilities for naive
    /// Bayes and logistic regression, raw margins for the SVM.
    pub fn class_scores<S: AsRef<str>>(&self, texts: &[S]) -> Vec<Vec<f64>> {
        let x = self.transform(texts);
        match &self.classifier {
            Classifier::NaiveBayes(m) => m
                .predict_log_proba(&x)
                .expect("validated")
                .into_iter()
                .map(|r| r.into_iter().map(f64::exp).collect())
                .collect(),
            Classifier::Linear(m) => {
                let scores = m.decision_function(&x).expect("validated");
                match m.kind {
                    LinearKind::LogisticRegression => scores.into_iter().map(softmax).collect(),
                    LinearKind::HingeSvm => scores,
                }
            }
        }
    }
}

fn softmax(mut z: Vec<f64>) -> Vec<f64> {
    let m = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for s in z.iter_mut() {
        *s = (*s - m).exp();
        total += *s;
    }
    z.iter_mut().for_each(|s| *s /= total);
    z
}

/// Fit every stage on `corpus`: tokens → vocabulary → counts → idf → tf-idf
/// → classifier.
pub fn pipeline_fit(
    corpus: &LabeledCorpus,
    model: ModelKind,
    hyper: &HyperParams,
    stoplist: &StopList,
) -> Result<TrainedPipeline> {
    hyper.validate()?;
    training_classes(&corpus.labels)?;

    let tokens: Vec<Vec<String>> = corpus.texts.iter().map(|t| analyze(t, stoplist)).collect();
    let vocabulary = fit_vocabulary(&tokens);
    if vocabulary.is_empty() {
        return Err(Error::DegenerateInput(Degenerate::EmptyVocabulary));
    }
    let counts = count_transform(&tokens, &vocabulary);
    let idf = fit_idf(&counts)?;
    let x = tfidf_transform(&counts, &idf)?;

    let classifier = match model {
        ModelKind::NaiveBayes => Classifier::NaiveBayes(nb_fit(&x, &corpus.labels, hyper.nb_alpha)?),
        ModelKind::Svm => Classifier::Linear(svm_fit(&x, &corpus.labels, hyper)?),
        ModelKind::LogisticRegression => Classifier::Linear(lr_fit(&x, &corpus.labels, hyper)?),
    };

    Ok(TrainedPipeline {
        task_kind: corpus.task_kind,
        stop_list_id: stoplist.list_id().to_string(),
        vocabulary,
        idf,
        classifier,
    })
}

pub fn pipeline_predict<S: AsRef<str>>(p: &TrainedPipeline, texts: &[S]) -> Vec<Label> {
    p.classifier
        .predict(&p.transform(texts))
        .expect("pipeline dimensions validated at fit/load")
}
