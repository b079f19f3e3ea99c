use serde::{Deserialize, Serialize};

use super::{argmax, ClassIndex, HyperParams};
use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::features::WeightMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinearKind {
    HingeSvm,
    LogisticRegression,
}

/// `scores = W x + b`.
///
/// A binary hinge SVM stores a single row scoring the larger class against
/// the smaller one; every other configuration stores one row per class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub kind: LinearKind,
    /// `n_score_rows × n_features`, row-major.
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub n_features: usize,
    pub hyper: HyperParams,
    pub class_index: ClassIndex,
    /// False when an iterative fit stopped at `max_iter` or could not make
    /// progress before meeting its tolerance.
    pub converged: bool,
    pub iterations: usize,
}

impl LinearModel {
    pub fn n_score_rows(&self) -> usize {
        self.bias.len()
    }

    pub fn is_single_row(&self) -> bool {
        self.n_score_rows() == 1
    }

    pub fn weight_row(&self, r: usize) -> &[f64] {
        &self.weights[r * self.n_features..(r + 1) * self.n_features]
    }

    /// Raw scores, one vector per input row, `n_score_rows` entries each.
    pub fn decision_function(&self, x: &WeightMatrix) -> Result<Vec<Vec<f64>>> {
        if x.n_cols() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                found: x.n_cols(),
            });
        }
        let v = self.n_features;
        Ok(x.rows()
            .map(|(idx, vals)| {
                (0..self.n_score_rows())
                    .map(|r| {
                        let w = &self.weights[r * v..(r + 1) * v];
                        self.bias[r] + idx.iter().zip(vals).map(|(&j, &x)| x * w[j]).sum::<f64>()
                    })
                    .collect()
            })
            .collect())
    }

    /// Class index chosen for one score vector.
    pub fn decide(&self, scores: &[f64]) -> usize {
        if self.is_single_row() {
            usize::from(scores[0] > 0.0)
        } else {
            argmax(scores)
        }
    }
}

pub fn linear_predict(model: &LinearModel, x: &WeightMatrix) -> Result<Vec<Label>> {
    Ok(model
        .decision_function(x)?
        .iter()
        .map(|s| model.class_index.label(model.decide(s)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(weights: Vec<f64>, bias: Vec<f64>, v: usize, classes: Vec<Label>) -> LinearModel {
        LinearModel {
            kind: LinearKind::LogisticRegression,
            weights,
            bias,
            n_features: v,
            hyper: HyperParams::default(),
            class_index: ClassIndex::from_sorted(classes).unwrap(),
            converged: true,
            iterations: 0,
        }
    }

    #[test]
    fn all_zero_model_picks_first_class() {
        let classes: Vec<Label> = (1..=5).map(Label::Stars).collect();
        let m = model(vec![0.0; 15], vec![0.0; 5], 3, classes);
        let x = WeightMatrix::from_dense(&[vec![1.0, 0.0, 2.0], vec![0.0; 3]], 3);
        assert_eq!(linear_predict(&m, &x).unwrap(), vec![Label::Stars(1); 2]);
    }

    #[test]
    fn hand_computed_scores() {
        // scores: [1*1 + 2*0 + 0*3 + 0.5, 0*1 - 1*0 + 1*3 - 1, -1*1 + 0 + 1*3 + 0]
        //       = [1.5, 2.0, 2.0] -> tie between 1 and 2 resolves to 1
        let w = vec![1.0, 2.0, 0.0, 0.0, -1.0, 1.0, -1.0, 0.0, 1.0];
        let m = model(w, vec![0.5, -1.0, 0.0], 3, vec![Label::Stars(1), Label::Stars(2), Label::Stars(3)]);
        let x = WeightMatrix::from_dense(&[vec![1.0, 0.0, 3.0]], 3);
        assert_eq!(m.decision_function(&x).unwrap()[0], vec![1.5, 2.0, 2.0]);
        assert_eq!(linear_predict(&m, &x).unwrap(), vec![Label::Stars(2)]);
    }

    #[test]
    fn shift_invariance() {
        let w = vec![0.3, -0.2, 0.9, 0.1, -0.5, 0.4];
        let m = model(w, vec![0.1, 0.2, 0.0], 2, vec![Label::Stars(1), Label::Stars(2), Label::Stars(5)]);
        let mut shifted = m.clone();
        for b in shifted.bias.iter_mut() {
            *b += 7.25;
        }
        let x = WeightMatrix::from_dense(&[vec![1.0, 0.0], vec![0.2, 0.8], vec![0.0, 0.0]], 2);
        assert_eq!(linear_predict(&m, &x).unwrap(), linear_predict(&shifted, &x).unwrap());
    }

    #[test]
    fn single_row_threshold() {
        let mut m = model(vec![1.0], vec![0.0], 1, vec![Label::Negative, Label::Positive]);
        m.kind = LinearKind::HingeSvm;
        let x = WeightMatrix::from_dense(&[vec![0.5], vec![-0.5], vec![0.0]], 1);
        assert_eq!(
            linear_predict(&m, &x).unwrap(),
            vec![Label::Positive, Label::Negative, Label::Negative]
        );
    }
}
