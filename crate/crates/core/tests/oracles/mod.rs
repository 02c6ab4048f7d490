//! Independent oracles shared by the core tests and the acceptance suite.
#![allow(dead_code)]

use fairprep::linalg::{cholesky_solve, dot, Matrix};
use fairprep::ml::loss::{cross_entropy, sigmoid_cross_entropy, softmax_cross_entropy, squared_error};
use fairprep::ml::{fit_linear, fit_logistic, sigmoid, Activation, Mlp, TrainConfig};
use fairprep::rng::Rng;

const H: f64 = 1e-5;

#[derive(Clone, Copy, Debug)]
pub enum Loss {
    Squared,
    SoftmaxLogits,
    SoftmaxProbs,
    SigmoidLogits,
}

pub fn random_matrix(rows: usize, cols: usize, rng: &mut Rng) -> Matrix {
    Matrix::from_vec(rows, cols, (0..rows * cols).map(|_| rng.normal()).collect()).unwrap()
}

pub struct Case {
    pub net: Mlp,
    pub x: Matrix,
    pub loss: Loss,
    pub target: Matrix,
    pub labels: Vec<usize>,
}

impl Case {
    fn value(&self, net: &Mlp, x: &Matrix) -> f64 {
        let cache = net.forward(x).unwrap();
        match self.loss {
            Loss::Squared => squared_error(cache.output(), &self.target).0,
            Loss::SoftmaxLogits => softmax_cross_entropy(&net.logits(&cache), &self.labels).0,
            Loss::SoftmaxProbs => cross_entropy(cache.output(), &self.labels).0,
            Loss::SigmoidLogits => {
                let y: Vec<f64> = self.labels.iter().map(|&l| l as f64).collect();
                sigmoid_cross_entropy(net.logits(&cache).as_slice(), &y).0
            }
        }
    }

    /// (parameter gradient, input gradient)
    fn analytic(&self) -> (Vec<f64>, Matrix) {
        let cache = self.net.forward(&self.x).unwrap();
        let g = match self.loss {
            Loss::Squared => {
                let (_, g) = squared_error(cache.output(), &self.target);
                self.net.backward(&cache, &g).unwrap()
            }
            Loss::SoftmaxLogits => {
                let (_, g) = softmax_cross_entropy(&self.net.logits(&cache), &self.labels);
                self.net.backward_from_logits(&cache, &g).unwrap()
            }
            Loss::SoftmaxProbs => {
                let (_, g) = cross_entropy(cache.output(), &self.labels);
                self.net.backward(&cache, &g).unwrap()
            }
            Loss::SigmoidLogits => {
                let y: Vec<f64> = self.labels.iter().map(|&l| l as f64).collect();
                let (_, g) = sigmoid_cross_entropy(self.net.logits(&cache).as_slice(), &y);
                let g = Matrix::from_vec(g.len(), 1, g).unwrap();
                self.net.backward_from_logits(&cache, &g).unwrap()
            }
        };
        (g.flatten(), g.input)
    }
}

pub fn rel_err(a: f64, n: f64) -> f64 {
    (a - n).abs() / a.abs().max(n.abs()).max(1e-5)
}

pub fn make_case(i: u64) -> Case {
    let mut rng = Rng::new(100 + i);
    let hidden = [Activation::Tanh, Activation::Sigmoid, Activation::Relu][i as usize % 3];
    let loss = [Loss::Squared, Loss::SoftmaxLogits, Loss::SoftmaxProbs, Loss::SigmoidLogits][(i / 3) as usize % 4];
    let d_in = 1 + rng.below(5);
    let depth = 1 + rng.below(3);
    let d_out = match loss {
        Loss::Squared => 1 + rng.below(3),
        Loss::SigmoidLogits => 1,
        _ => 2 + rng.below(3),
    };
    let mut dims = vec![d_in];
    for _ in 1..depth {
        dims.push(1 + rng.below(6));
    }
    dims.push(d_out);
    let output = match loss {
        Loss::Squared => [Activation::Identity, Activation::Tanh, Activation::Sigmoid][rng.below(3)],
        Loss::SoftmaxLogits | Loss::SoftmaxProbs => Activation::Softmax,
        Loss::SigmoidLogits => Activation::Sigmoid,
    };
    let mut net = Mlp::new(&dims, hidden, output, &mut rng).unwrap();
    // nonzero biases so every parameter is exercised
    let p: Vec<f64> = net.parameters().iter().map(|w| w + 0.1 * rng.normal()).collect();
    net.set_parameters(&p).unwrap();
    let n = 3 + rng.below(5);
    Case {
        x: random_matrix(n, d_in, &mut rng),
        target: random_matrix(n, d_out, &mut rng),
        labels: (0..n).map(|_| rng.below(d_out.max(2))).collect(),
        net,
        loss,
    }
}

/// Max relative error over every parameter and input cell.
pub fn check(case: &Case) -> f64 {
    let (gp, gx) = case.analytic();
    let mut worst: f64 = 0.0;
    let base = case.net.parameters();
    for k in 0..base.len() {
        let mut net = case.net.clone();
        let mut p = base.clone();
        p[k] = base[k] + H;
        net.set_parameters(&p).unwrap();
        let up = case.value(&net, &case.x);
        p[k] = base[k] - H;
        net.set_parameters(&p).unwrap();
        let down = case.value(&net, &case.x);
        worst = worst.max(rel_err(gp[k], (up - down) / (2.0 * H)));
    }
    for r in 0..case.x.rows() {
        for c in 0..case.x.cols() {
            let mut x = case.x.clone();
            x.set(r, c, case.x.get(r, c) + H);
            let up = case.value(&case.net, &x);
            x.set(r, c, case.x.get(r, c) - H);
            let down = case.value(&case.net, &x);
            worst = worst.max(rel_err(gx.get(r, c), (up - down) / (2.0 * H)));
        }
    }
    worst
}

pub fn system(seed: u64, n: usize, d: usize) -> (Matrix, Vec<f64>) {
    let mut rng = Rng::new(seed);
    let x = Matrix::from_vec(n, d, (0..n * d).map(|_| rng.normal()).collect()).unwrap();
    let w: Vec<f64> = (0..d).map(|_| rng.normal()).collect();
    let y = (0..n).map(|r| dot(x.row(r), &w) + 0.5 + 0.3 * rng.normal()).collect();
    (x, y)
}

/// Gradient descent on `‖y − Xw − b‖² + λ‖w‖²` with step 1/L.
pub fn ridge_gd(x: &Matrix, y: &[f64], lambda: f64) -> (Vec<f64>, f64) {
    let (n, d) = x.shape();
    let xm: Vec<f64> = (0..d).map(|j| x.column(j).iter().sum::<f64>() / n as f64).collect();
    let ym = y.iter().sum::<f64>() / n as f64;
    let xc: Vec<Vec<f64>> = (0..n).map(|r| x.row(r).iter().zip(&xm).map(|(a, m)| a - m).collect()).collect();
    // Lipschitz bound via the trace of XᵀX
    let trace: f64 = xc.iter().flatten().map(|v| v * v).sum();
    let step = 1.0 / (2.0 * (trace + lambda));
    let mut w = vec![0.0; d];
    for _ in 0..20_000 {
        let mut g: Vec<f64> = w.iter().map(|wj| 2.0 * lambda * wj).collect();
        for (r, row) in xc.iter().enumerate() {
            let e = dot(row, &w) - (y[r] - ym);
            for (gj, xv) in g.iter_mut().zip(row) {
                *gj += 2.0 * e * xv;
            }
        }
        for (wj, gj) in w.iter_mut().zip(&g) {
            *wj -= step * gj;
        }
    }
    let b = ym - dot(&xm, &w);
    (w, b)
}

/// Newton / IRLS on mean cross-entropy + l2‖w‖², intercept unpenalized.
pub fn logistic_irls(x: &Matrix, y: &[f64], l2: f64) -> Vec<f64> {
    let (n, d) = x.shape();
    let nf = n as f64;
    let mut beta = vec![0.0; d + 1];
    for _ in 0..50 {
        let mut g = vec![0.0; d + 1];
        let mut h = Matrix::zeros(d + 1, d + 1);
        for r in 0..n {
            let mut xr = x.row(r).to_vec();
            xr.push(1.0);
            let p = sigmoid(dot(&xr, &beta));
            for i in 0..=d {
                g[i] += (p - y[r]) * xr[i] / nf;
                for j in 0..=d {
                    h.set(i, j, h.get(i, j) + p * (1.0 - p) * xr[i] * xr[j] / nf);
                }
            }
        }
        for i in 0..d {
            g[i] += 2.0 * l2 * beta[i];
            h.set(i, i, h.get(i, i) + 2.0 * l2);
        }
        let step = cholesky_solve(&h, &g).unwrap();
        for (b, s) in beta.iter_mut().zip(&step) {
            *b -= s;
        }
    }
    beta
}


/// Largest relative error over `cases` gradient-check cases.
pub fn gradient_fidelity(cases: u64) -> f64 {
    (0..cases).map(|i| check(&make_case(i))).fold(0.0, f64::max)
}

/// Worst ridge coefficient distance over 10 systems and worst logistic
/// distance over 5 problems.
pub fn solver_distances() -> (f64, f64) {
    let mut ridge: f64 = 0.0;
    for seed in 0..10 {
        let (x, y) = system(seed, 60, 1 + seed as usize % 5);
        let lambda = [0.0, 0.1, 1.0, 10.0][seed as usize % 4];
        let m = fit_linear(&x, &y, lambda).unwrap();
        let (w, b) = ridge_gd(&x, &y, lambda);
        let dist = m.weights.iter().zip(&w).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        ridge = ridge.max(dist).max((m.intercept - b).abs());
    }
    let mut logistic: f64 = 0.0;
    for seed in 0..5 {
        let (x, y) = classification(seed);
        let cfg = irls_comparable_config();
        let m = fit_logistic(&x, &y, &cfg).unwrap();
        let beta = logistic_irls(&x, &y, cfg.l2);
        let d = x.cols();
        for j in 0..d {
            logistic = logistic.max((m.weights[j] - beta[j]).abs());
        }
        logistic = logistic.max((m.intercept - beta[d]).abs());
    }
    (ridge, logistic)
}

pub fn classification(seed: u64) -> (Matrix, Vec<f64>) {
    let mut rng = Rng::new(50 + seed);
    let (n, d) = (300, 3);
    let x = Matrix::from_vec(n, d, (0..n * d).map(|_| rng.normal()).collect()).unwrap();
    let y = (0..n)
        .map(|r| f64::from(u8::from(rng.bernoulli(sigmoid(x.get(r, 0) - 0.5 * x.get(r, 1) + 0.3)))))
        .collect();
    (x, y)
}

pub fn irls_comparable_config() -> TrainConfig {
    TrainConfig {
        learning_rate: 0.5,
        epochs: 5000,
        ..Default::default()
    }
}
