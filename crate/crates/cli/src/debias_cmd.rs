use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use fairprep::debias::{leakage_probe, train_debiaser, DebiasConfig, TrainingTrace};
use fairprep::tabular::{load_csv, load_schema, to_csv_string, Column, DataTable, Role};
use fairprep::Error;

use crate::io::{read_file, require_file, require_parent, split_list, write_atomic, write_json, CliResult, Failure};

#[derive(Debug, Args)]
pub struct DebiasArgs {
    /// Input CSV
    #[arg(long)]
    input: PathBuf,
    /// Schema JSON (a list of column specs)
    #[arg(long)]
    schema: PathBuf,
    /// Protected column(s), comma separated
    #[arg(long)]
    protected: String,
    /// Debiased CSV
    #[arg(long)]
    output: PathBuf,
    /// Trained model artifact (JSON)
    #[arg(long)]
    model_out: Option<PathBuf>,
    /// Report JSON: effective config, training trace, probe AUCs
    #[arg(long)]
    report: Option<PathBuf>,
    /// Debias config JSON; flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    latent: Option<usize>,
    #[arg(long)]
    adversary_steps: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Serialize)]
struct ProbeResult {
    column: String,
    auc_pre: f64,
    auc_post: Option<f64>,
}

#[derive(Debug, Serialize)]
struct DebiasReport {
    status: &'static str,
    input: String,
    rows: usize,
    protected: Vec<String>,
    config: DebiasConfig,
    latent_dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    diverged_at_epoch: Option<usize>,
    warnings: Vec<String>,
    probe: Vec<ProbeResult>,
    trace: TrainingTrace,
}

fn effective_config(a: &DebiasArgs) -> CliResult<DebiasConfig> {
    let mut cfg = match &a.config {
        Some(p) => {
            require_file(p, "config")?;
            serde_json::from_slice(&read_file(p)?)
                .map_err(|e| Failure::data(format!("{}: {e}", p.display())))?
        }
        None => DebiasConfig::default(),
    };
    if let Some(v) = a.lambda {
        cfg.lambda = v;
    }
    if let Some(v) = a.epochs {
        cfg.epochs = v;
    }
    if let Some(v) = a.latent {
        cfg.latent_dim = Some(v);
    }
    if let Some(v) = a.adversary_steps {
        cfg.adversary_steps_per_encoder_step = v;
    }
    if let Some(v) = a.learning_rate {
        cfg.learning_rate = v;
    }
    if let Some(v) = a.batch_size {
        cfg.batch_size = v;
    }
    if let Some(v) = a.seed {
        cfg.seed = v;
    }
    cfg.validate().map_err(|e| Failure::usage(e.to_string()))?;
    Ok(cfg)
}

pub fn run(a: &DebiasArgs) -> CliResult {
    require_file(&a.input, "input")?;
    require_file(&a.schema, "schema")?;
    for out in [Some(&a.output), a.model_out.as_ref(), a.report.as_ref()].into_iter().flatten() {
        require_parent(out)?;
    }
    let cfg = effective_config(a)?;
    let protected = split_list(&a.protected);
    if protected.is_empty() {
        return Err(Failure::usage("--protected names no column"));
    }

    let mut schema = load_schema(&a.schema)?;
    for p in &protected {
        let spec = schema
            .iter_mut()
            .find(|s| &s.name == p)
            .ok_or_else(|| Failure::usage(format!("--protected `{p}` is not in the schema")))?;
        spec.role = Role::Protected;
    }
    let table = load_csv(&a.input, &schema)?;
    let order: Vec<String> = table.names().iter().map(|s| s.to_string()).collect();
    // role=drop columns bypass the debiaser and are restored verbatim
    let (dropped, kept): (Vec<Column>, Vec<Column>) =
        table.into_columns().into_iter().partition(|c| c.spec.role == Role::Drop);
    let work = DataTable::new(kept)?;

    let mut report = DebiasReport {
        status: "ok",
        input: a.input.display().to_string(),
        rows: work.n_rows(),
        protected: protected.clone(),
        config: cfg.clone(),
        latent_dim: None,
        diverged_at_epoch: None,
        warnings: Vec::new(),
        probe: Vec::new(),
        trace: TrainingTrace::default(),
    };
    let (model, trace) = match train_debiaser(&work, &cfg) {
        Ok(v) => v,
        Err(Error::DebiasDiverged { epoch, trace }) => {
            report.status = "diverged";
            report.diverged_at_epoch = Some(epoch);
            report.trace = trace;
            if let Some(r) = &a.report {
                write_json(r, &report)?;
            }
            return Err(Error::DebiasDiverged {
                epoch,
                trace: report.trace,
            }
            .into());
        }
        Err(e) => return Err(e.into()),
    };
    let debiased = model.transform(&work)?;

    let mut columns = Vec::with_capacity(order.len());
    let mut dropped = dropped.into_iter();
    for name in &order {
        match debiased.column(name) {
            Ok(c) => columns.push(c.clone()),
            Err(_) => columns.push(dropped.next().expect("dropped column in order")),
        }
    }
    let out = DataTable::new(columns)?;
    write_atomic(&a.output, to_csv_string(&out)?.as_bytes())?;
    if let Some(m) = &a.model_out {
        write_atomic(m, format!("{}\n", model.to_json()?).as_bytes())?;
    }

    for p in &protected {
        report.probe.push(ProbeResult {
            column: p.clone(),
            auc_pre: leakage_probe(&work, p, cfg.seed)?,
            auc_post: Some(leakage_probe(&debiased, p, cfg.seed)?),
        });
    }
    report.latent_dim = Some(model.latent_dim());
    report.warnings = model.warnings().to_vec();
    report.trace = trace;
    if let Some(r) = &a.report {
        write_json(r, &report)?;
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    println!("debiased {} rows into {}", out.n_rows(), a.output.display());
    for p in &report.probe {
        println!(
            "probe AUC {}: {:.3} -> {:.3}",
            p.column,
            p.auc_pre,
            p.auc_post.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
