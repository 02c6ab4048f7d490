//! Downstream models: logistic regression by full-batch gradient descent and
//! linear / ridge regression by the normal equations.

use serde::{Deserialize, Serialize};

use super::loss::sigmoid_cross_entropy;
use super::mlp::sigmoid;
use crate::error::{Error, Result};
use crate::linalg::{cholesky_solve, dot, Matrix};
use crate::rng::{streams, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinearKind {
    Linear,
    Logistic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub kind: LinearKind,
    pub weights: Vec<f64>,
    pub intercept: f64,
    /// Penalty used by the closed-form fit; zero for logistic and plain
    /// linear models.
    pub ridge_lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    /// Rows per gradient step; 0 means full batch.
    pub batch_size: usize,
    pub l2: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            epochs: 500,
            batch_size: 0,
            l2: 1e-4,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidArgument("learning_rate must be > 0".into()));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidArgument("epochs must be >= 1".into()));
        }
        if !(self.l2 >= 0.0) {
            return Err(Error::InvalidArgument("l2 must be >= 0".into()));
        }
        Ok(())
    }
}

impl LinearModel {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// Probabilities for logistic models, real predictions for linear ones.
    pub fn predict(&self, x: &Matrix) -> Result<Vec<f64>> {
        if x.cols() != self.weights.len() {
            return Err(Error::Dimension(format!(
                "{} features, model has {}",
                x.cols(),
                self.weights.len()
            )));
        }
        Ok((0..x.rows())
            .map(|r| {
                let z = dot(x.row(r), &self.weights) + self.intercept;
                match self.kind {
                    LinearKind::Linear => z,
                    LinearKind::Logistic => sigmoid(z),
                }
            })
            .collect())
    }
}

pub fn predict(model: &LinearModel, x: &Matrix) -> Result<Vec<f64>> {
    model.predict(x)
}

fn check_xy(x: &Matrix, n_y: usize) -> Result<()> {
    if x.rows() != n_y {
        return Err(Error::Dimension(format!(
            "{} rows of features, {} labels",
            x.rows(),
            n_y
        )));
    }
    if !x.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// Objective: mean cross-entropy + `l2 · ‖w‖²` (intercept unpenalized).
pub fn logistic_objective(x: &Matrix, y: &[f64], w: &[f64], b: f64, l2: f64) -> f64 {
    let z: Vec<f64> = (0..x.rows()).map(|r| dot(x.row(r), w) + b).collect();
    sigmoid_cross_entropy(&z, y).0 + l2 * dot(w, w)
}

pub fn fit_logistic(x: &Matrix, y: &[f64], cfg: &TrainConfig) -> Result<LinearModel> {
    fit_logistic_traced(x, y, cfg).map(|(m, _)| m)
}

/// Like [`fit_logistic`], also returning the objective at the start of every
/// epoch.
pub fn fit_logistic_traced(
    x: &Matrix,
    y: &[f64],
    cfg: &TrainConfig,
) -> Result<(LinearModel, Vec<f64>)> {
    cfg.validate()?;
    check_xy(x, y.len())?;
    if y.len() < 2 {
        return Err(Error::InvalidArgument("logistic fit needs n >= 2".into()));
    }
    if y.iter().any(|&v| v != 0.0 && v != 1.0) {
        return Err(Error::InvalidArgument("logistic labels must be 0 or 1".into()));
    }
    let pos = y.iter().filter(|&&v| v == 1.0).count();
    if pos == 0 || pos == y.len() {
        return Err(Error::SingleClass);
    }

    let (n, d) = x.shape();
    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let batch = if cfg.batch_size == 0 || cfg.batch_size >= n {
        n
    } else {
        cfg.batch_size
    };
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = Rng::stream(cfg.seed, streams::BATCHES);
    let mut trace = Vec::with_capacity(cfg.epochs);

    for epoch in 0..cfg.epochs {
        let obj = logistic_objective(x, y, &w, b, cfg.l2);
        if !obj.is_finite() {
            return Err(Error::Diverged { epoch });
        }
        trace.push(obj);
        if batch < n {
            rng.shuffle(&mut order);
        }
        for chunk in order.chunks(batch) {
            let m = chunk.len() as f64;
            let mut gw = vec![0.0; d];
            let mut gb = 0.0;
            for &r in chunk {
                let row = x.row(r);
                let err = sigmoid(dot(row, &w) + b) - y[r];
                for (g, &xv) in gw.iter_mut().zip(row) {
                    *g += err * xv;
                }
                gb += err;
            }
            for (wj, g) in w.iter_mut().zip(&gw) {
                *wj -= cfg.learning_rate * (g / m + 2.0 * cfg.l2 * *wj);
            }
            b -= cfg.learning_rate * gb / m;
        }
        if w.iter().any(|v| !v.is_finite()) || !b.is_finite() {
            return Err(Error::Diverged { epoch });
        }
    }
    Ok((
        LinearModel {
            kind: LinearKind::Logistic,
            weights: w,
            intercept: b,
            ridge_lambda: 0.0,
        },
        trace,
    ))
}

/// Minimizes `‖y − X w − b‖² + λ ‖w‖²` in closed form. Centering the columns
/// first leaves the intercept unpenalized.
pub fn fit_linear(x: &Matrix, y: &[f64], ridge_lambda: f64) -> Result<LinearModel> {
    check_xy(x, y.len())?;
    if !(ridge_lambda >= 0.0) || !ridge_lambda.is_finite() {
        return Err(Error::InvalidArgument("ridge_lambda must be finite and >= 0".into()));
    }
    if y.is_empty() {
        return Err(Error::EmptyInput);
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let (n, d) = x.shape();
    let nf = n as f64;
    let x_mean: Vec<f64> = x.column_sums().into_iter().map(|s| s / nf).collect();
    let y_mean = y.iter().sum::<f64>() / nf;

    let mut xc = x.clone();
    for r in 0..n {
        for (v, m) in xc.row_mut(r).iter_mut().zip(&x_mean) {
            *v -= m;
        }
    }
    let yc: Vec<f64> = y.iter().map(|v| v - y_mean).collect();
    let mut gram = xc.t_matmul(&xc);
    for j in 0..d {
        gram.set(j, j, gram.get(j, j) + ridge_lambda);
    }
    let rhs = xc.t_matmul(&Matrix::column_vector(&yc)).into_vec();
    let w = if d == 0 { Vec::new() } else { cholesky_solve(&gram, &rhs)? };
    let intercept = y_mean - dot(&x_mean, &w);
    Ok(LinearModel {
        kind: LinearKind::Linear,
        weights: w,
        intercept,
        ridge_lambda,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line_recovered() {
        let x = Matrix::from_rows(&[vec![0.0], vec![1.0], vec![2.0], vec![5.0]]).unwrap();
        let y = [1.0, 3.0, 5.0, 11.0];
        let m = fit_linear(&x, &y, 0.0).unwrap();
        assert!((m.weights[0] - 2.0).abs() < 1e-9);
        assert!((m.intercept - 1.0).abs() < 1e-9);
        let p = m.predict(&Matrix::from_rows(&[vec![3.0]]).unwrap()).unwrap();
        assert!((p[0] - 7.0).abs() < 1e-9);
    }

    #[test]
    fn huge_ridge_shrinks_to_mean() {
        let x = Matrix::from_rows(&[vec![0.0], vec![1.0], vec![2.0], vec![5.0]]).unwrap();
        let y = [1.0, 3.0, 5.0, 11.0];
        let m = fit_linear(&x, &y, 1e12).unwrap();
        assert!(m.weights[0].abs() < 1e-9);
        assert!((m.intercept - 5.0).abs() < 1e-9);
    }

    #[test]
    fn singular_without_ridge() {
        let x = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0], vec![3.0, 6.0]]).unwrap();
        assert!(matches!(fit_linear(&x, &[1.0, 2.0, 3.0], 0.0), Err(Error::Singular)));
        assert!(fit_linear(&x, &[1.0, 2.0, 3.0], 0.1).is_ok());
    }

    #[test]
    fn separable_1d() {
        let x = Matrix::from_rows(&[vec![-1.0], vec![1.0]]).unwrap();
        let y = [0.0, 1.0];
        let m = fit_logistic(&x, &y, &TrainConfig::default()).unwrap();
        let p = m.predict(&x).unwrap();
        assert!(p[0] < 0.5 && p[1] > 0.5);
    }

    #[test]
    fn logistic_errors() {
        let x = Matrix::from_rows(&[vec![-1.0], vec![1.0]]).unwrap();
        assert!(matches!(
            fit_logistic(&x, &[1.0, 1.0], &TrainConfig::default()),
            Err(Error::SingleClass)
        ));
        let cfg = TrainConfig {
            learning_rate: 1e308,
            ..TrainConfig::default()
        };
        let x = Matrix::from_rows(&[vec![1e10], vec![-1e10], vec![2e10]]).unwrap();
        assert!(matches!(
            fit_logistic(&x, &[1.0, 0.0, 0.0], &cfg),
            Err(Error::Diverged { .. })
        ));
    }

    #[test]
    fn zero_weights_logistic_predicts_half() {
        let m = LinearModel {
            kind: LinearKind::Logistic,
            weights: vec![0.0; 3],
            intercept: 0.0,
            ridge_lambda: 0.0,
        };
        let p = m.predict(&Matrix::from_rows(&[vec![1.0, 2.0, 3.0]]).unwrap()).unwrap();
        assert_eq!(p, vec![0.5]);
        assert!(m.predict(&Matrix::zeros(1, 2)).is_err());
    }
}
