//! Fully connected feed-forward network with explicit backpropagation.
//!
//! Layer `l` computes `z = a W + b` with `W` of shape `fan_in × fan_out`,
//! followed by the hidden activation (all but the last layer) or the output
//! activation. Weights are initialized `U(-1/√fan_in, 1/√fan_in)`, biases at
//! zero.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Identity,
    Relu,
    Tanh,
    Sigmoid,
    Softmax,
}

impl Activation {
    fn apply(self, z: &mut Matrix) {
        match self {
            Activation::Identity => {}
            Activation::Relu => z.map_inplace(|x| x.max(0.0)),
            Activation::Tanh => z.map_inplace(f64::tanh),
            Activation::Sigmoid => z.map_inplace(sigmoid),
            Activation::Softmax => {
                for r in 0..z.rows() {
                    softmax_inplace(z.row_mut(r));
                }
            }
        }
    }

    /// Given the activation output `a` and `dL/da`, returns `dL/dz`.
    fn backprop(self, a: &Matrix, grad: &Matrix) -> Matrix {
        let mut out = grad.clone();
        match self {
            Activation::Identity => {}
            Activation::Relu => {
                for (g, &y) in out.as_mut_slice().iter_mut().zip(a.as_slice()) {
                    if y <= 0.0 {
                        *g = 0.0;
                    }
                }
            }
            Activation::Tanh => {
                for (g, &y) in out.as_mut_slice().iter_mut().zip(a.as_slice()) {
                    *g *= 1.0 - y * y;
                }
            }
            Activation::Sigmoid => {
                for (g, &y) in out.as_mut_slice().iter_mut().zip(a.as_slice()) {
                    *g *= y * (1.0 - y);
                }
            }
            Activation::Softmax => {
                // dz_j = s_j (g_j - Σ_k g_k s_k)
                for r in 0..a.rows() {
                    let s = a.row(r);
                    let g = grad.row(r);
                    let inner: f64 = s.iter().zip(g).map(|(a, b)| a * b).sum();
                    for (o, (&sj, &gj)) in out.row_mut(r).iter_mut().zip(s.iter().zip(g)) {
                        *o = sj * (gj - inner);
                    }
                }
            }
        }
        out
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

pub fn softmax_inplace(row: &mut [f64]) {
    let m = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for x in row.iter_mut() {
        *x = (*x - m).exp();
        sum += *x;
    }
    for x in row.iter_mut() {
        *x /= sum;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    pub weights: Matrix,
    pub bias: Vec<f64>,
}

impl Dense {
    fn zeros_like(&self) -> Dense {
        Dense {
            weights: Matrix::zeros(self.weights.rows(), self.weights.cols()),
            bias: vec![0.0; self.bias.len()],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Mlp {
    layers: Vec<Dense>,
    hidden: Activation,
    output: Activation,
    /// Bumped on every parameter change; forward caches remember it.
    #[serde(skip)]
    generation: u64,
}

impl PartialEq for Mlp {
    fn eq(&self, other: &Self) -> bool {
        self.layers == other.layers && self.hidden == other.hidden && self.output == other.output
    }
}

/// Activations of one forward pass, needed by `backward`.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    /// `acts[0]` is the input, `acts[l + 1]` the output of layer `l`.
    acts: Vec<Matrix>,
    generation: u64,
    dims: Vec<usize>,
}

impl ForwardCache {
    pub fn output(&self) -> &Matrix {
        self.acts.last().expect("at least input and output")
    }

    pub fn layer_outputs(&self) -> &[Matrix] {
        &self.acts
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<Dense>,
    /// `dL/dX` for the network input.
    pub input: Matrix,
}

impl Gradients {
    pub fn flatten(&self) -> Vec<f64> {
        flatten_layers(&self.layers)
    }
}

fn flatten_layers(layers: &[Dense]) -> Vec<f64> {
    let mut out = Vec::new();
    for l in layers {
        out.extend_from_slice(l.weights.as_slice());
        out.extend_from_slice(&l.bias);
    }
    out
}

impl Mlp {
    pub fn new(dims: &[usize], hidden: Activation, output: Activation, rng: &mut Rng) -> Result<Self> {
        if dims.len() < 2 || dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidArgument(format!(
                "layer dims {dims:?}: need at least two widths, all >= 1"
            )));
        }
        if matches!(hidden, Activation::Softmax) {
            return Err(Error::InvalidArgument("softmax is an output activation".into()));
        }
        let layers = dims
            .windows(2)
            .map(|w| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let bound = 1.0 / (fan_in as f64).sqrt();
                let data = (0..fan_in * fan_out)
                    .map(|_| rng.uniform_range(-bound, bound))
                    .collect();
                Dense {
                    weights: Matrix::from_vec(fan_in, fan_out, data).expect("shape"),
                    bias: vec![0.0; fan_out],
                }
            })
            .collect();
        Ok(Self {
            layers,
            hidden,
            output,
            generation: 0,
        })
    }

    /// Builds a network from explicit layers, checking that shapes chain.
    pub fn from_layers(layers: Vec<Dense>, hidden: Activation, output: Activation) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidArgument("network without layers".into()));
        }
        for (i, l) in layers.iter().enumerate() {
            if l.bias.len() != l.weights.cols() {
                return Err(Error::Dimension(format!("layer {i}: bias/weight width mismatch")));
            }
            if i > 0 && layers[i - 1].weights.cols() != l.weights.rows() {
                return Err(Error::Dimension(format!("layer {i} does not chain")));
            }
            if !l.weights.is_finite() || l.bias.iter().any(|b| !b.is_finite()) {
                return Err(Error::NonFinite);
            }
        }
        Ok(Self {
            layers,
            hidden,
            output,
            generation: 0,
        })
    }

    pub fn dims(&self) -> Vec<usize> {
        let mut d = vec![self.layers[0].weights.rows()];
        d.extend(self.layers.iter().map(|l| l.weights.cols()));
        d
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].weights.rows()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().expect("non-empty").weights.cols()
    }

    pub fn layers(&self) -> &[Dense] {
        &self.layers
    }

    pub fn hidden_activation(&self) -> Activation {
        self.hidden
    }

    pub fn output_activation(&self) -> Activation {
        self.output
    }

    pub fn n_params(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.rows() * l.weights.cols() + l.bias.len())
            .sum()
    }

    /// All parameters, layer by layer: weights (row-major) then bias.
    pub fn parameters(&self) -> Vec<f64> {
        flatten_layers(&self.layers)
    }

    pub fn set_parameters(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.n_params() {
            return Err(Error::Dimension(format!(
                "{} parameters for a network with {}",
                params.len(),
                self.n_params()
            )));
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite);
        }
        let mut off = 0;
        for l in &mut self.layers {
            let w = l.weights.as_mut_slice();
            w.copy_from_slice(&params[off..off + w.len()]);
            off += w.len();
            let b = l.bias.len();
            l.bias.copy_from_slice(&params[off..off + b]);
            off += b;
        }
        self.generation += 1;
        Ok(())
    }

    pub fn forward(&self, x: &Matrix) -> Result<ForwardCache> {
        if x.cols() != self.input_dim() {
            return Err(Error::Dimension(format!(
                "input has {} columns, network expects {}",
                x.cols(),
                self.input_dim()
            )));
        }
        if !x.is_finite() {
            return Err(Error::NonFinite);
        }
        let mut acts = Vec::with_capacity(self.layers.len() + 1);
        acts.push(x.clone());
        let last = self.layers.len() - 1;
        for (i, l) in self.layers.iter().enumerate() {
            let mut z = acts[i].matmul(&l.weights);
            z.add_row_vector(&l.bias);
            if i == last {
                self.output.apply(&mut z);
            } else {
                self.hidden.apply(&mut z);
            }
            acts.push(z);
        }
        Ok(ForwardCache {
            acts,
            generation: self.generation,
            dims: self.dims(),
        })
    }

    pub fn predict(&self, x: &Matrix) -> Result<Matrix> {
        let mut cache = self.forward(x)?;
        Ok(cache.acts.pop().expect("output"))
    }

    /// Output pre-activation (logits) for a cache from this network.
    pub fn logits(&self, cache: &ForwardCache) -> Matrix {
        let last = self.layers.last().expect("non-empty");
        let mut z = cache.acts[cache.acts.len() - 2].matmul(&last.weights);
        z.add_row_vector(&last.bias);
        z
    }

    fn check_cache(&self, cache: &ForwardCache, grad: &Matrix) -> Result<()> {
        if cache.generation != self.generation || cache.dims != self.dims() {
            return Err(Error::InvalidArgument(
                "forward cache is stale or belongs to another network".into(),
            ));
        }
        if grad.shape() != cache.output().shape() {
            return Err(Error::Dimension(format!(
                "loss gradient {:?} vs output {:?}",
                grad.shape(),
                cache.output().shape()
            )));
        }
        Ok(())
    }

    /// Backpropagates `dL/d(output)` where output is the activated network
    /// output.
    pub fn backward(&self, cache: &ForwardCache, grad_output: &Matrix) -> Result<Gradients> {
        self.check_cache(cache, grad_output)?;
        let dz = self.output.backprop(cache.output(), grad_output);
        Ok(self.backprop_from(cache, dz))
    }

    /// Backpropagates `dL/dz` for the final pre-activation. This is the
    /// numerically stable route for softmax/sigmoid cross-entropy, whose
    /// logit gradient is simply `p - y`.
    pub fn backward_from_logits(&self, cache: &ForwardCache, grad_logits: &Matrix) -> Result<Gradients> {
        self.check_cache(cache, grad_logits)?;
        Ok(self.backprop_from(cache, grad_logits.clone()))
    }

    fn backprop_from(&self, cache: &ForwardCache, mut dz: Matrix) -> Gradients {
        let mut grads: Vec<Dense> = self.layers.iter().map(Dense::zeros_like).collect();
        let mut input = Matrix::zeros(0, 0);
        for i in (0..self.layers.len()).rev() {
            let a_in = &cache.acts[i];
            grads[i].weights = a_in.t_matmul(&dz);
            grads[i].bias = dz.column_sums();
            let da = dz.matmul_t(&self.layers[i].weights);
            if i == 0 {
                input = da;
            } else {
                dz = self.hidden.backprop(&cache.acts[i], &da);
            }
        }
        Gradients {
            layers: grads,
            input,
        }
    }
}
