use super::model::DebiasModel;
use super::{DebiasConfig, EpochLosses, TrainingTrace};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::ml::loss::softmax_cross_entropy;
use crate::ml::{Activation, Adam, Mlp};
use crate::rng::{streams, Rng};
use crate::tabular::{Block, ColumnSpec, DataTable, Encoder, Role};

pub(crate) const MIN_ROWS: usize = 50;

/// Protected labels as class indices plus the column spec they came from.
pub(crate) struct ProtectedLabels {
    pub spec: ColumnSpec,
    pub labels: Vec<usize>,
}

pub(crate) fn protected_labels(table: &DataTable) -> Result<Vec<ProtectedLabels>> {
    let mut out = Vec::new();
    for col in table.columns_with_role(Role::Protected) {
        let codes = col.as_codes().ok_or_else(|| Error::WrongKind {
            column: col.name().to_string(),
            expected: "categorical or binary",
        })?;
        let mut labels = Vec::with_capacity(codes.len());
        for c in codes {
            labels.push(c.ok_or_else(|| Error::MissingCells(col.name().to_string()))? as usize);
        }
        if labels.iter().all(|&l| l == labels[0]) {
            return Err(Error::ConstantProtected(col.name().to_string()));
        }
        out.push(ProtectedLabels {
            spec: col.spec.clone(),
            labels,
        });
    }
    if out.is_empty() {
        return Err(Error::InvalidArgument("no column has role=protected".into()));
    }
    Ok(out)
}

/// Reconstruction loss averaged over design blocks: squared error for a
/// numeric column, softmax cross-entropy for a one-hot group. Returns the
/// loss and its gradient with respect to the decoder output.
pub(crate) fn reconstruction_loss(out: &Matrix, target: &Matrix, blocks: &[Block]) -> (f64, Matrix) {
    let n = out.rows();
    let scale = 1.0 / (n.max(1) as f64 * blocks.len().max(1) as f64);
    let mut grad = Matrix::zeros(n, out.cols());
    let mut loss = 0.0;
    for r in 0..n {
        let o = out.row(r);
        let t = target.row(r);
        let g = grad.row_mut(r);
        for b in blocks {
            let s = b.start;
            if !b.one_hot {
                let d = o[s] - t[s];
                loss += d * d;
                g[s] = 2.0 * d * scale;
                continue;
            }
            let z = &o[s..s + b.width];
            let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lse = m + z.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
            for k in 0..b.width {
                let p = (z[k] - lse).exp();
                // input rows are exact one-hots
                loss -= t[s + k] * (z[k] - lse);
                g[s + k] = (p - t[s + k]) * scale;
            }
        }
    }
    (loss * scale, grad)
}

fn row_batches(n: usize, batch: usize, rng: &mut Rng) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..n).collect();
    if batch >= n {
        return vec![order];
    }
    rng.shuffle(&mut order);
    order.chunks(batch).map(|c| c.to_vec()).collect()
}

struct Net {
    mlp: Mlp,
    opt: Adam,
    params: Vec<f64>,
}

impl Net {
    fn new(mlp: Mlp, lr: f64) -> Self {
        let params = mlp.parameters();
        Self {
            opt: Adam::new(params.len(), lr),
            mlp,
            params,
        }
    }

    fn step(&mut self, grads: &[f64]) -> Result<()> {
        self.opt.step(&mut self.params, grads);
        self.mlp.set_parameters(&self.params)
    }
}

/// Trains encoder, decoder and adversaries on `table`. Only role=feature
/// columns enter the encoder; every protected column gets an adversary.
pub fn train_debiaser(table: &DataTable, cfg: &DebiasConfig) -> Result<(DebiasModel, TrainingTrace)> {
    cfg.validate()?;
    if table.n_rows() < MIN_ROWS {
        return Err(Error::InvalidArgument(format!(
            "debiasing needs at least {MIN_ROWS} rows, got {}",
            table.n_rows()
        )));
    }
    let protected = protected_labels(table)?;
    let encoder_cols = Encoder::fit(table)?;
    let d = encoder_cols.width();
    if d == 0 {
        return Err(Error::InvalidArgument("no feature columns to debias".into()));
    }
    let x = encoder_cols.encode(table)?.values;
    let blocks = encoder_cols.blocks();
    let latent = cfg.latent_for(d);
    let mut warnings = Vec::new();
    if latent >= d {
        warnings.push(format!(
            "latent_dim {latent} >= feature dim {d}: the encoder can learn a trivial identity"
        ));
    }

    let mut init = Rng::stream(cfg.seed, streams::INIT);
    let hidden = 2 * d;
    let mut enc = Net::new(
        Mlp::new(&[d, hidden, latent], Activation::Tanh, Activation::Tanh, &mut init)?,
        cfg.learning_rate,
    );
    let mut dec = Net::new(
        Mlp::new(&[latent, hidden, d], Activation::Tanh, Activation::Identity, &mut init)?,
        cfg.learning_rate,
    );
    let mut advs = Vec::with_capacity(protected.len());
    for p in &protected {
        let c = p.spec.categories.len();
        advs.push(Net::new(
            Mlp::new(&[latent, latent, c], Activation::Tanh, Activation::Softmax, &mut init)?,
            cfg.learning_rate,
        ));
    }

    let mut trace = TrainingTrace::default();
    {
        let z = enc.mlp.predict(&x)?;
        let mut l = 0.0;
        for (adv, p) in advs.iter().zip(&protected) {
            let cache = adv.mlp.forward(&z)?;
            l += softmax_cross_entropy(&adv.mlp.logits(&cache), &p.labels).0;
        }
        trace.initial_adversary_loss = l;
    }

    let n = table.n_rows();
    let mut batch_rng = Rng::stream(cfg.seed, streams::BATCHES);
    let fail = |epoch: usize, trace: &TrainingTrace| Error::DebiasDiverged {
        epoch,
        trace: trace.clone(),
    };

    for epoch in 0..cfg.epochs {
        let mut sums = [0.0f64; 3];
        let batches = row_batches(n, cfg.batch_size, &mut batch_rng);
        for rows in &batches {
            let full = rows.len() == n;
            let xb = if full { x.clone() } else { x.select_rows(rows) };
            let labels: Vec<Vec<usize>> = protected
                .iter()
                .map(|p| {
                    if full {
                        p.labels.clone()
                    } else {
                        rows.iter().map(|&r| p.labels[r]).collect()
                    }
                })
                .collect();

            // (a) adversaries chase the current code
            let z = enc.mlp.predict(&xb)?;
            for (adv, y) in advs.iter_mut().zip(&labels) {
                for _ in 0..cfg.adversary_steps_per_encoder_step {
                    let cache = adv.mlp.forward(&z)?;
                    let (l, g) = softmax_cross_entropy(&adv.mlp.logits(&cache), y);
                    if !l.is_finite() {
                        return Err(fail(epoch, &trace));
                    }
                    let grads = adv.mlp.backward_from_logits(&cache, &g)?;
                    adv.step(&grads.flatten()).map_err(|_| fail(epoch, &trace))?;
                }
            }

            // (b) encoder + decoder: reconstruction minus λ·adversary loss
            let enc_cache = enc.mlp.forward(&xb)?;
            let z = enc_cache.output().clone();
            let dec_cache = dec.mlp.forward(&z)?;
            let (recon, g_out) = reconstruction_loss(dec_cache.output(), &xb, &blocks);
            let dec_grads = dec.mlp.backward(&dec_cache, &g_out)?;
            let mut dz = dec_grads.input.clone();
            let mut adv_loss = 0.0;
            for (adv, y) in advs.iter().zip(&labels) {
                let cache = adv.mlp.forward(&z)?;
                let (l, g) = softmax_cross_entropy(&adv.mlp.logits(&cache), y);
                adv_loss += l;
                let ga = adv.mlp.backward_from_logits(&cache, &g)?;
                // gradient reversal
                for (a, b) in dz.as_mut_slice().iter_mut().zip(ga.input.as_slice()) {
                    *a -= cfg.lambda * b;
                }
            }
            let combined = recon - cfg.lambda * adv_loss;
            if !combined.is_finite() {
                return Err(fail(epoch, &trace));
            }
            let enc_grads = enc.mlp.backward(&enc_cache, &dz)?;
            dec.step(&dec_grads.flatten()).map_err(|_| fail(epoch, &trace))?;
            enc.step(&enc_grads.flatten()).map_err(|_| fail(epoch, &trace))?;
            sums[0] += recon;
            sums[1] += adv_loss;
            sums[2] += combined;
        }
        let k = batches.len() as f64;
        trace.epochs.push(EpochLosses {
            reconstruction: sums[0] / k,
            adversary: sums[1] / k,
            combined: sums[2] / k,
        });
    }

    let model = DebiasModel::from_parts(
        encoder_cols,
        enc.mlp,
        dec.mlp,
        advs.into_iter().map(|a| a.mlp).collect(),
        protected.into_iter().map(|p| p.spec).collect(),
        cfg.clone(),
        warnings,
    )?;
    Ok((model, trace))
}
