//! Adversarial debiasing.
//!
//! An encoder maps the standardized feature block to a latent code, a decoder
//! reconstructs the features from that code, and one adversary per protected
//! column tries to predict the protected category from the code. Training
//! alternates between
//!
//! 1. `adversary_steps_per_encoder_step` Adam steps on each adversary,
//!    minimizing its cross-entropy on the current codes, and
//! 2. one Adam step on encoder and decoder, minimizing
//!    `reconstruction − λ · adversary cross-entropy`. The adversary term
//!    reaches the encoder through a gradient-reversal coupling: the gradient
//!    with respect to the code is backpropagated through the adversary once
//!    and enters the encoder negated and scaled by λ.
//!
//! The debiased dataset is the decoded reconstruction in the source schema;
//! protected, target and any other non-feature columns pass through as-is.

mod model;
mod probe;
mod train;

use serde::{Deserialize, Serialize};

pub use model::{DebiasArtifact, DebiasModel};
pub use probe::{leakage_probe, leakage_probe_with};
pub use train::train_debiaser;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DebiasConfig {
    /// Width of the latent code; `None` picks `max(2, ⌈d/2⌉)` for `d`
    /// design columns.
    pub latent_dim: Option<usize>,
    /// λ, the weight of the adversary term. λ = 0 is a plain autoencoder.
    #[serde(alias = "adversary_weight")]
    pub lambda: f64,
    pub epochs: usize,
    pub adversary_steps_per_encoder_step: usize,
    pub learning_rate: f64,
    /// Rows per step; tables with at most this many rows train full batch.
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for DebiasConfig {
    fn default() -> Self {
        Self {
            latent_dim: None,
            lambda: 1.0,
            epochs: 200,
            adversary_steps_per_encoder_step: 3,
            learning_rate: 1e-2,
            batch_size: 4096,
            seed: 0,
        }
    }
}

impl DebiasConfig {
    pub fn validate(&self) -> Result<()> {
        if self.latent_dim == Some(0) {
            return Err(Error::InvalidArgument("latent_dim must be >= 1".into()));
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidArgument("lambda must be finite and >= 0".into()));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidArgument("epochs must be >= 1".into()));
        }
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return Err(Error::InvalidArgument("learning_rate must be > 0".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidArgument("batch_size must be >= 1".into()));
        }
        Ok(())
    }

    pub fn latent_for(&self, design_width: usize) -> usize {
        self.latent_dim
            .unwrap_or_else(|| 2usize.max(design_width.div_ceil(2)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochLosses {
    pub reconstruction: f64,
    pub adversary: f64,
    pub combined: f64,
}

/// Per-epoch losses, averaged over the epoch's encoder steps.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingTrace {
    pub epochs: Vec<EpochLosses>,
    /// Adversary cross-entropy on the initial codes, before any update.
    pub initial_adversary_loss: f64,
}

impl TrainingTrace {
    pub fn len(&self) -> usize {
        self.epochs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.epochs.is_empty()
    }

    pub fn last(&self) -> Option<&EpochLosses> {
        self.epochs.last()
    }

    /// CSV with header `epoch,recon_loss,adv_loss,combined`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("epoch,recon_loss,adv_loss,combined\n");
        for (i, e) in self.epochs.iter().enumerate() {
            s.push_str(&format!(
                "{},{},{},{}\n",
                i + 1,
                e.reconstruction,
                e.adversary,
                e.combined
            ));
        }
        s
    }
}
