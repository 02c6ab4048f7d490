use std::path::PathBuf;

use clap::Args;

use fairprep::debias::DebiasConfig;
use fairprep::studies::{synth_check, ModelKind, SyntheticSpec};

use crate::io::{require_parent, write_json, CliResult, Failure};

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 2000)]
    n: usize,
    /// Chance that a protected-group row with fair label 0 is flipped to 1
    #[arg(long, default_value_t = 0.3)]
    beta: f64,
    /// Proxy strength; 1 copies the protected column
    #[arg(long, default_value_t = 0.8)]
    rho: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fair features
    #[arg(long, default_value_t = 3)]
    d: usize,
    #[arg(long, default_value_t = 2)]
    proxies: usize,
    /// Protected-group prevalence
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    latent: Option<usize>,
    /// Report JSON
    #[arg(long)]
    report: Option<PathBuf>,
}

pub fn run(a: &SynthArgs) -> CliResult {
    if let Some(r) = &a.report {
        require_parent(r)?;
    }
    let spec = SyntheticSpec {
        n: a.n,
        d: a.d,
        proxies: a.proxies,
        p: a.p,
        rho: a.rho,
        beta: a.beta,
        seed: a.seed,
        ..Default::default()
    };
    spec.validate().map_err(|e| Failure::usage(e.to_string()))?;
    let mut debias = DebiasConfig {
        seed: a.seed,
        ..Default::default()
    };
    if let Some(v) = a.lambda {
        debias.lambda = v;
    }
    if let Some(v) = a.epochs {
        debias.epochs = v;
    }
    if let Some(v) = a.latent {
        debias.latent_dim = Some(v);
    }
    debias.validate().map_err(|e| Failure::usage(e.to_string()))?;
    let model = ModelKind::Logistic { train: Default::default() };
    let check = synth_check(&spec, &debias, &model)?;
    if let Some(r) = &a.report {
        write_json(r, &check)?;
    }
    println!("flipped labels: {}", check.flipped);
    for (name, ph) in [("pre", &check.pre), ("post", &check.post)] {
        println!(
            "{name:<4} probe AUC {:.3}  fair accuracy {:.3}  observed accuracy {:.3}  bias score {:.2}",
            ph.probe_auc, ph.fair_accuracy, ph.observed_accuracy, ph.bias_score_all
        );
    }
    if !check.bias_detected {
        println!("no bias detected");
    }
    Ok(())
}
