//! Scalar losses with their gradients. All losses average over rows.

use crate::linalg::Matrix;

/// Inside-the-loss probability clamp for cross-entropy on probabilities.
pub const PROB_CLAMP: f64 = 1e-12;

/// `(1/n) Σ_i ‖ŷ_i − y_i‖²` and its gradient `2 (ŷ − y) / n`.
pub fn squared_error(pred: &Matrix, target: &Matrix) -> (f64, Matrix) {
    assert_eq!(pred.shape(), target.shape());
    let n = pred.rows().max(1) as f64;
    let mut grad = pred.clone();
    let mut loss = 0.0;
    for (g, &t) in grad.as_mut_slice().iter_mut().zip(target.as_slice()) {
        let d = *g - t;
        loss += d * d;
        *g = 2.0 * d / n;
    }
    (loss / n, grad)
}

/// Mean cross-entropy of softmax(`logits`) against class indices, computed
/// with log-sum-exp. Returns the loss and `dL/dlogits = (p − onehot) / n`.
pub fn softmax_cross_entropy(logits: &Matrix, labels: &[usize]) -> (f64, Matrix) {
    assert_eq!(logits.rows(), labels.len());
    let n = logits.rows().max(1) as f64;
    let mut grad = Matrix::zeros(logits.rows(), logits.cols());
    let mut loss = 0.0;
    for (r, &y) in labels.iter().enumerate() {
        let z = logits.row(r);
        let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = z.iter().map(|v| (v - m).exp()).sum();
        let lse = m + sum.ln();
        loss += lse - z[y];
        for (k, g) in grad.row_mut(r).iter_mut().enumerate() {
            let p = (z[k] - lse).exp();
            *g = (p - f64::from(u8::from(k == y))) / n;
        }
    }
    (loss / n, grad)
}

/// Mean cross-entropy on probabilities (e.g. a softmax output), with the
/// probabilities clamped to `[1e-12, 1 − 1e-12]`. Gradient is with respect
/// to the probabilities.
pub fn cross_entropy(probs: &Matrix, labels: &[usize]) -> (f64, Matrix) {
    assert_eq!(probs.rows(), labels.len());
    let n = probs.rows().max(1) as f64;
    let mut grad = Matrix::zeros(probs.rows(), probs.cols());
    let mut loss = 0.0;
    for (r, &y) in labels.iter().enumerate() {
        let p = probs.get(r, y).clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
        loss -= p.ln();
        grad.set(r, y, -1.0 / (p * n));
    }
    (loss / n, grad)
}

/// Mean binary cross-entropy of sigmoid(`logit`) against 0/1 targets:
/// `max(z, 0) − z y + ln(1 + e^{−|z|})`.
pub fn sigmoid_cross_entropy(logits: &[f64], y: &[f64]) -> (f64, Vec<f64>) {
    assert_eq!(logits.len(), y.len());
    let n = logits.len().max(1) as f64;
    let mut loss = 0.0;
    let grad = logits
        .iter()
        .zip(y)
        .map(|(&z, &t)| {
            loss += z.max(0.0) - z * t + (-z.abs()).exp().ln_1p();
            (super::mlp::sigmoid(z) - t) / n
        })
        .collect();
    (loss / n, grad)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn softmax_ce_matches_probability_route() {
        let logits = Matrix::from_rows(&[vec![1.0, -0.5, 2.0], vec![0.0, 0.3, -1.0]]).unwrap();
        let labels = [2, 0];
        let (a, _) = softmax_cross_entropy(&logits, &labels);
        let mut probs = logits.clone();
        for r in 0..2 {
            super::super::mlp::softmax_inplace(probs.row_mut(r));
        }
        let (b, _) = cross_entropy(&probs, &labels);
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn stable_for_extreme_logits() {
        let logits = Matrix::from_rows(&[vec![1000.0, -1000.0]]).unwrap();
        let (l, g) = softmax_cross_entropy(&logits, &[1]);
        assert!(l.is_finite() && (l - 2000.0).abs() < 1e-9);
        assert!(g.is_finite());
        let (l, _) = sigmoid_cross_entropy(&[800.0, -800.0], &[0.0, 1.0]);
        assert!((l - 800.0).abs() < 1e-9);
    }

    #[test]
    fn squared_error_value() {
        let p = Matrix::from_rows(&[vec![1.0], vec![3.0]]).unwrap();
        let t = Matrix::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
        let (l, g) = squared_error(&p, &t);
        assert_eq!(l, 2.5);
        assert_eq!(g.as_slice(), &[1.0, 2.0]);
    }
}
