//! Multinomial logistic regression.
//!
//! Minimizes the summed softmax negative log-likelihood plus
//! `(l2 / 2) ||W||²` (bias unregularized) by full-batch gradient descent with
//! an Armijo backtracking line search.

use super::linear::{LinearKind, LinearModel};
use super::{training_classes, HyperParams};
use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::features::WeightMatrix;

const ARMIJO_C: f64 = 1e-4;
const MIN_STEP: f64 = 1e-30;

/// Objective value and gradient at `params`.
///
/// `params` holds `W` (`k × n_features`, row-major) followed by the `k`
/// biases; the gradient uses the same layout. `y` holds class indices.
pub fn softmax_objective(
    params: &[f64],
    x: &WeightMatrix,
    y: &[usize],
    k: usize,
    l2: f64,
) -> (f64, Vec<f64>) {
    let v = x.n_cols();
    assert_eq!(params.len(), k * v + k);
    let (w, b) = params.split_at(k * v);
    let mut grad = vec![0.0; params.len()];
    let mut loss = 0.0;
    let mut z = vec![0.0; k];

    for (i, &yi) in y.iter().enumerate() {
        let (idx, vals) = x.row(i);
        for c in 0..k {
            let wc = &w[c * v..(c + 1) * v];
            z[c] = b[c] + idx.iter().zip(vals).map(|(&j, &xv)| xv * wc[j]).sum::<f64>();
        }
        let m = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = m + z.iter().map(|s| (s - m).exp()).sum::<f64>().ln();
        loss += lse - z[yi];
        for c in 0..k {
            let mut d = (z[c] - lse).exp();
            if c == yi {
                d -= 1.0;
            }
            if d != 0.0 {
                let gc = &mut grad[c * v..(c + 1) * v];
                for (&j, &xv) in idx.iter().zip(vals) {
                    gc[j] += d * xv;
                }
                grad[k * v + c] += d;
            }
        }
    }

    if l2 > 0.0 {
        let mut sq = 0.0;
        for (g, &wj) in grad[..k * v].iter_mut().zip(w) {
            *g += l2 * wj;
            sq += wj * wj;
        }
        loss += 0.5 * l2 * sq;
    }
    (loss, grad)
}

/// Objective value after every accepted step, starting from the zero model.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LrTrace {
    pub objective: Vec<f64>,
}

pub fn lr_fit(x: &WeightMatrix, y: &[Label], hyper: &HyperParams) -> Result<LinearModel> {
    lr_fit_traced(x, y, hyper).map(|(m, _)| m)
}

pub fn lr_fit_traced(
    x: &WeightMatrix,
    y: &[Label],
    hyper: &HyperParams,
) -> Result<(LinearModel, LrTrace)> {
    hyper.validate()?;
    if x.n_rows() != y.len() {
        return Err(Error::Range(format!(
            "{} rows but {} labels",
            x.n_rows(),
            y.len()
        )));
    }
    let class_index = training_classes(y)?;
    let yi = class_index.encode(y)?;
    let k = class_index.len();
    let v = x.n_cols();
    let l2 = hyper.lr_l2(y.len());

    let mut params = vec![0.0; k * v + k];
    let (mut f, mut g) = softmax_objective(&params, x, &yi, k, l2);
    let mut trace = LrTrace { objective: vec![f] };
    let mut step = 1.0;
    let mut converged = false;
    let mut iterations = 0;
    let mut trial = vec![0.0; params.len()];

    'outer: while iterations < hyper.max_iter {
        let g_inf = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if g_inf < hyper.tolerance {
            converged = true;
            break;
        }
        let g_sq: f64 = g.iter().map(|v| v * v).sum();
        loop {
            for ((t, p), d) in trial.iter_mut().zip(&params).zip(&g) {
                *t = p - step * d;
            }
            let (ft, gt) = softmax_objective(&trial, x, &yi, k, l2);
            if ft.is_finite() && ft <= f - ARMIJO_C * step * g_sq {
                std::mem::swap(&mut params, &mut trial);
                f = ft;
                g = gt;
                trace.objective.push(f);
                break;
            }
            step *= 0.5;
            if step < MIN_STEP {
                break 'outer;
            }
        }
        iterations += 1;
        step *= 2.0;
    }
    if !converged && iterations == hyper.max_iter {
        let g_inf = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        converged = g_inf < hyper.tolerance;
    }

    let bias = params.split_off(k * v);
    Ok((
        LinearModel {
            kind: LinearKind::LogisticRegression,
            weights: params,
            bias,
            n_features: v,
            hyper: hyper.clone(),
            class_index,
            converged,
            iterations,
        },
        trace,
    ))
}
