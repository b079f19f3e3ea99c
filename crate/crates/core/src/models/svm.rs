//! Linear SVM trained by SGD on the L2-regularized hinge loss.
//!
//! Each binary problem minimizes
//! `(l2 / 2) ||w||² + (1 / n) Σ max(0, 1 - y_i (w·x_i + b))`
//! with one subgradient step per example, step size
//! `eta_t = 1 / (l2 * (t0 + t))`, and a fresh Fisher–Yates shuffle of the rows
//! every epoch. The bias is not regularized. Multiclass problems are reduced
//! one-vs-rest; two classes train a single scorer for the larger class.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::linear::{LinearKind, LinearModel};
use super::{training_classes, HyperParams, LearningRate};
use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::features::WeightMatrix;

pub fn svm_fit(x: &WeightMatrix, y: &[Label], hyper: &HyperParams) -> Result<LinearModel> {
    hyper.validate()?;
    if x.n_rows() != y.len() {
        return Err(Error::Range(format!(
            "{} rows but {} labels",
            x.n_rows(),
            y.len()
        )));
    }
    let l2 = hyper.svm_l2();
    if l2 <= 0.0 {
        return Err(Error::InvalidHyperParams(
            "the SGD hinge-loss schedule needs l2_strength > 0".into(),
        ));
    }
    let class_index = training_classes(y)?;
    let yi = class_index.encode(y)?;
    let k = class_index.len();
    let v = x.n_cols();

    let targets: Vec<usize> = if k == 2 { vec![1] } else { (0..k).collect() };
    let mut weights = Vec::with_capacity(targets.len() * v);
    let mut bias = Vec::with_capacity(targets.len());
    for &c in &targets {
        let signs: Vec<f64> = yi.iter().map(|&l| if l == c { 1.0 } else { -1.0 }).collect();
        let (w, b) = sgd_binary(x, &signs, l2, hyper);
        weights.extend(w);
        bias.push(b);
    }

    Ok(LinearModel {
        kind: LinearKind::HingeSvm,
        weights,
        bias,
        n_features: v,
        hyper: hyper.clone(),
        class_index,
        converged: true,
        iterations: hyper.epochs,
    })
}

fn sgd_binary(x: &WeightMatrix, y: &[f64], l2: f64, hyper: &HyperParams) -> (Vec<f64>, f64) {
    let LearningRate::InverseScaling { t0 } = hyper.learning_rate;
    let t0 = t0.unwrap_or(1.0 / l2);

    // w = scale * v, so the per-step shrink is O(1) on sparse rows.
    let mut v = vec![0.0f64; x.n_cols()];
    let mut scale = 1.0f64;
    let mut b = 0.0f64;
    let mut order: Vec<usize> = (0..x.n_rows()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(hyper.seed);
    let mut t = 0u64;

    for _ in 0..hyper.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let eta = 1.0 / (l2 * (t0 + t as f64));
            let margin = y[i] * (scale * x.row_dot(i, &v) + b);

            let shrink = 1.0 - eta * l2;
            if shrink > 0.0 {
                scale *= shrink;
            } else {
                v.iter_mut().for_each(|w| *w = 0.0);
                scale = 1.0;
            }

            if margin < 1.0 {
                let step = eta * y[i] / scale;
                let (idx, vals) = x.row(i);
                for (&j, &xv) in idx.iter().zip(vals) {
                    v[j] += step * xv;
                }
                b += eta * y[i];
            }

            if scale < 1e-9 {
                v.iter_mut().for_each(|w| *w *= scale);
                scale = 1.0;
            }
            t += 1;
        }
    }

    v.iter_mut().for_each(|w| *w *= scale);
    (v, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Degenerate;
    use crate::models::linear_predict;

    fn separable() -> (WeightMatrix, Vec<Label>) {
        // 8 unit-norm points: positives lean on feature 0, negatives on feature 1.
        let rows = vec![
            vec![1.0, 0.0, 0.0],
            vec![0.8, 0.0, 0.6],
            vec![0.6, 0.0, 0.8],
            vec![0.96, 0.28, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.8, 0.6],
            vec![0.0, 0.6, 0.8],
            vec![0.28, 0.96, 0.0],
        ];
        let y = [[Label::Positive; 4], [Label::Negative; 4]].concat();
        (WeightMatrix::from_dense(&rows, 3), y)
    }

    #[test]
    fn separable_fixture_is_learned() {
        let (x, y) = separable();
        let hyper = HyperParams { epochs: 20, ..Default::default() };
        let m = svm_fit(&x, &y, &hyper).unwrap();
        assert!(m.is_single_row());
        assert_eq!(linear_predict(&m, &x).unwrap(), y);
    }

    #[test]
    fn multiclass_one_vs_rest() {
        let rows: Vec<Vec<f64>> = (0..12)
            .map(|i| {
                let mut r = vec![0.0; 3];
                r[i % 3] = 1.0;
                r
            })
            .collect();
        let y: Vec<Label> = (0..12).map(|i| Label::Stars([1, 3, 5][i % 3])).collect();
        let x = WeightMatrix::from_dense(&rows, 3);
        let m = svm_fit(&x, &y, &HyperParams { epochs: 20, ..Default::default() }).unwrap();
        assert_eq!(m.n_score_rows(), 3);
        assert_eq!(linear_predict(&m, &x).unwrap(), y);
    }

    #[test]
    fn zero_rows_follow_bias_sign() {
        let x = WeightMatrix::from_dense(&vec![vec![0.0, 0.0]; 5], 2);
        let y = vec![
            Label::Positive,
            Label::Positive,
            Label::Positive,
            Label::Negative,
            Label::Positive,
        ];
        let m = svm_fit(&x, &y, &HyperParams::default()).unwrap();
        assert!(m.weights.iter().all(|&w| w == 0.0));
        let expect = if m.bias[0] > 0.0 { Label::Positive } else { Label::Negative };
        assert!(linear_predict(&m, &x).unwrap().iter().all(|&l| l == expect));
    }

    #[test]
    fn same_seed_same_bits() {
        let (x, y) = separable();
        let h = HyperParams { epochs: 7, seed: 9, ..Default::default() };
        let a = svm_fit(&x, &y, &h).unwrap();
        let b = svm_fit(&x, &y, &h).unwrap();
        assert_eq!(
            a.weights.iter().map(|w| w.to_bits()).collect::<Vec<_>>(),
            b.weights.iter().map(|w| w.to_bits()).collect::<Vec<_>>()
        );
        assert_eq!(a.bias[0].to_bits(), b.bias[0].to_bits());
    }

    #[test]
    fn rejects_degenerate_input() {
        let (x, _) = separable();
        let y = vec![Label::Positive; 8];
        assert!(matches!(
            svm_fit(&x, &y, &HyperParams::default()),
            Err(Error::DegenerateInput(Degenerate::SingleClass))
        ));
        let y = separable().1;
        let h = HyperParams { l2_strength: Some(0.0), ..Default::default() };
        assert!(matches!(svm_fit(&x, &y, &h), Err(Error::InvalidHyperParams(_))));
    }
}
