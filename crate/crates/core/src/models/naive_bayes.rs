use serde::{Deserialize, Serialize};

use super::{argmax, training_classes, ClassIndex};
use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::features::WeightMatrix;

/// Multinomial naive Bayes over (possibly fractional) feature mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NbModel {
    pub log_prior: Vec<f64>,
    /// `K × V`, row-major.
    pub log_likelihood: Vec<f64>,
    pub n_features: usize,
    pub alpha: f64,
    pub class_index: ClassIndex,
}

pub fn nb_fit(x: &WeightMatrix, y: &[Label], alpha: f64) -> Result<NbModel> {
    if x.n_rows() != y.len() {
        return Err(Error::Range(format!(
            "{} rows but {} labels",
            x.n_rows(),
            y.len()
        )));
    }
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(Error::InvalidHyperParams(format!("alpha must be > 0, got {alpha}")));
    }
    let class_index = training_classes(y)?;
    let yi = class_index.encode(y)?;
    let (k, v) = (class_index.len(), x.n_cols());

    let mut class_count = vec![0usize; k];
    let mut mass = vec![0.0f64; k * v];
    for (i, &c) in yi.iter().enumerate() {
        class_count[c] += 1;
        let (idx, vals) = x.row(i);
        let row = &mut mass[c * v..(c + 1) * v];
        for (&j, &w) in idx.iter().zip(vals) {
            row[j] += w;
        }
    }

    let n = y.len() as f64;
    let log_prior = class_count.iter().map(|&c| (c as f64 / n).ln()).collect();
    let mut log_likelihood = vec![0.0; k * v];
    for c in 0..k {
        let row = &mass[c * v..(c + 1) * v];
        let total: f64 = row.iter().sum();
        let denom = (total + alpha * v as f64).ln();
        for j in 0..v {
            log_likelihood[c * v + j] = (row[j] + alpha).ln() - denom;
        }
    }

    Ok(NbModel {
        log_prior,
        log_likelihood,
        n_features: v,
        alpha,
        class_index,
    })
}

impl NbModel {
    /// Unnormalized joint log-likelihood `log P(c) + Σ_j x_j log P(j | c)`.
    pub fn joint_log_likelihood(&self, x: &WeightMatrix) -> Result<Vec<Vec<f64>>> {
        if x.n_cols() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                found: x.n_cols(),
            });
        }
        let v = self.n_features;
        Ok(x.rows()
            .map(|(idx, vals)| {
                self.log_prior
                    .iter()
                    .enumerate()
                    .map(|(c, &lp)| {
                        let ll = &self.log_likelihood[c * v..(c + 1) * v];
                        lp + idx.iter().zip(vals).map(|(&j, &w)| w * ll[j]).sum::<f64>()
                    })
                    .collect()
            })
            .collect())
    }

    /// Per-row log posteriors, normalized with log-sum-exp.
    pub fn predict_log_proba(&self, x: &WeightMatrix) -> Result<Vec<Vec<f64>>> {
        let mut jll = self.joint_log_likelihood(x)?;
        for row in jll.iter_mut() {
            let m = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lse = m + row.iter().map(|s| (s - m).exp()).sum::<f64>().ln();
            for s in row.iter_mut() {
                *s -= lse;
            }
        }
        Ok(jll)
    }
}

pub fn nb_predict(model: &NbModel, x: &WeightMatrix) -> Result<Vec<Label>> {
    Ok(model
        .joint_log_likelihood(x)?
        .iter()
        .map(|s| model.class_index.label(argmax(s)))
        .collect())
}
