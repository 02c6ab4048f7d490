use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{prepare, resolve_data, AuditOn, DebiasFitOn, StudyConfig};
use super::pipeline::{fit_and_predict, ModelKind};
use crate::audit::{audit, AuditInput, AuditReport, BiasScore, Performance, RunMeta};
use crate::debias::{leakage_probe, train_debiaser, DebiasConfig, EpochLosses};
use crate::error::{Error, Result};
use crate::tabular::{split_table_indices, DataTable, Split};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedResult {
    pub seed: u64,
    pub pre: AuditReport,
    pub post: AuditReport,
    pub probe_auc_pre: f64,
    pub probe_auc_post: f64,
    pub debias_final: Option<EpochLosses>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub median: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    /// Median (mean of the middle pair for even counts), min and max.
    /// Infinite values sort last.
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let k = v.len();
        let median = if k % 2 == 1 { v[k / 2] } else { (v[k / 2 - 1] + v[k / 2]) / 2.0 };
        Some(Self {
            median,
            min: v[0],
            max: v[k - 1],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratumSummary {
    pub stratum: String,
    pub pre: Summary,
    pub post: Summary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub true_values: Option<Summary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub bias_scores: Vec<StratumSummary>,
    pub metric: String,
    pub performance_pre: Summary,
    pub performance_post: Summary,
    pub probe_auc_pre: Summary,
    pub probe_auc_post: Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub name: String,
    pub config: StudyConfig,
    pub config_digest: String,
    pub data_file: String,
    pub data_sha256: String,
    pub rows: usize,
    pub warnings: Vec<String>,
    pub seeds: Vec<SeedResult>,
    pub aggregate: Aggregate,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Replaces the configured seed list.
    pub seeds: Option<Vec<u64>>,
    pub cache_dir: Option<std::path::PathBuf>,
}

/// Resolves the data, prepares the table and runs every seed.
pub fn run_study(cfg: &StudyConfig, bundled_dir: &Path, opts: &RunOptions) -> Result<StudyResult> {
    let mut cfg = cfg.clone();
    if let Some(seeds) = &opts.seeds {
        cfg.seeds = seeds.clone();
    }
    cfg.validate()?;
    let data = resolve_data(&cfg.data, opts.cache_dir.as_deref(), bundled_dir)?;
    let table = prepare(&cfg, &data.path)?;
    let mut result = run_prepared(&cfg, &table)?;
    result.data_file = cfg.data.file.clone();
    result.data_sha256 = data.sha256;
    result.warnings = data.warnings;
    Ok(result)
}

/// Runs every seed on an already prepared table; seeds run in parallel and
/// results keep the configured order.
pub fn run_prepared(cfg: &StudyConfig, table: &DataTable) -> Result<StudyResult> {
    let digest = crate::audit::RunMeta::new("config", 0, cfg)?.config_digest;
    let seeds: Vec<SeedResult> = cfg
        .seeds
        .par_iter()
        .map(|&s| run_seed(cfg, table, s, &digest))
        .collect::<Result<_>>()?;
    let aggregate = aggregate(&seeds, &cfg.model)?;
    Ok(StudyResult {
        name: cfg.name.clone(),
        config: cfg.clone(),
        config_digest: digest,
        data_file: String::new(),
        data_sha256: String::new(),
        rows: table.n_rows(),
        warnings: Vec::new(),
        seeds,
        aggregate,
    })
}

fn split_label(cfg: &StudyConfig, seed: u64) -> String {
    let strat = if cfg.model.is_classifier() { "stratified" } else { "unstratified" };
    format!(
        "test {}% ({strat}, seed {seed})",
        (cfg.test_fraction * 100.0).round()
    )
}

/// The downstream pipeline plus audit. Called with the raw and the
/// debiased table; nothing else differs between the two calls.
fn pipeline_report(
    cfg: &StudyConfig,
    table: &DataTable,
    split: &Split,
    seed: u64,
    meta: RunMeta,
) -> Result<AuditReport> {
    let out = fit_and_predict(table, split, &cfg.model, seed)?;
    let perf = Performance {
        metric: cfg.model.metric().to_string(),
        value: out.score_on(&split.test, &cfg.model)?,
        split: split_label(cfg, seed),
    };
    let (rows, estimates): (Vec<usize>, Vec<f64>) = match cfg.audit_on {
        AuditOn::All => ((0..table.n_rows()).collect(), out.predictions),
        AuditOn::Test => (split.test.clone(), split.test.iter().map(|&r| out.predictions[r]).collect()),
    };
    let sub = if rows.len() == table.n_rows() { table.clone() } else { table.select_rows(&rows) };
    let stratum = cfg.stratify.then_some(cfg.target.as_str());
    let input = AuditInput::from_table(estimates, &sub, &cfg.protected, stratum, &cfg.audit)?;
    audit(&input, Some(perf), &cfg.audit, meta)
}

fn run_seed(cfg: &StudyConfig, table: &DataTable, seed: u64, digest: &str) -> Result<SeedResult> {
    let split = split_table_indices(table, cfg.test_fraction, seed)?;
    let meta = |label: &str| RunMeta {
        label: label.to_string(),
        seed,
        config_digest: digest.to_string(),
    };
    let pre = pipeline_report(cfg, table, &split, seed, meta("pre"))?;

    let dcfg = DebiasConfig {
        seed,
        ..cfg.debias.clone()
    };
    let fit_table = match cfg.debias_fit_on {
        DebiasFitOn::All => table.clone(),
        DebiasFitOn::Train => table.select_rows(&split.train),
    };
    let (model, trace) = train_debiaser(&fit_table, &dcfg)?;
    let debiased = model.transform(table)?;
    let post = pipeline_report(cfg, &debiased, &split, seed, meta("post"))?;
    Ok(SeedResult {
        seed,
        probe_auc_pre: leakage_probe(table, &cfg.protected, seed)?,
        probe_auc_post: leakage_probe(&debiased, &cfg.protected, seed)?,
        pre,
        post,
        debias_final: trace.last().copied(),
    })
}

fn summarize(values: impl Iterator<Item = f64>) -> Result<Summary> {
    Summary::of(&values.collect::<Vec<_>>()).ok_or(Error::EmptyInput)
}

fn aggregate(seeds: &[SeedResult], model: &ModelKind) -> Result<Aggregate> {
    let first = seeds.first().ok_or(Error::EmptyInput)?;
    let score = |r: &AuditReport, stratum: &str| -> f64 {
        r.bias_table.row(stratum).map_or(f64::NAN, |row| row.bias_score.value())
    };
    let mut bias_scores = Vec::new();
    for row in &first.pre.bias_table.rows {
        let s = row.stratum.as_str();
        let true_values = match &first.pre.true_values {
            Some(_) => Some(summarize(seeds.iter().map(|x| {
                x.pre
                    .true_values
                    .as_ref()
                    .and_then(|t| t.row(s))
                    .map_or(f64::NAN, |r| r.bias_score.value())
            }))?),
            None => None,
        };
        bias_scores.push(StratumSummary {
            stratum: s.to_string(),
            pre: summarize(seeds.iter().map(|x| score(&x.pre, s)))?,
            post: summarize(seeds.iter().map(|x| score(&x.post, s)))?,
            true_values,
        });
    }
    let perf = |r: &AuditReport| r.performance.as_ref().map_or(f64::NAN, |p| p.value);
    Ok(Aggregate {
        bias_scores,
        metric: model.metric().to_string(),
        performance_pre: summarize(seeds.iter().map(|x| perf(&x.pre)))?,
        performance_post: summarize(seeds.iter().map(|x| perf(&x.post)))?,
        probe_auc_pre: summarize(seeds.iter().map(|x| x.probe_auc_pre))?,
        probe_auc_post: summarize(seeds.iter().map(|x| x.probe_auc_post))?,
    })
}

impl StudyResult {
    pub fn stratum(&self, name: &str) -> Option<&StratumSummary> {
        self.aggregate.bias_scores.iter().find(|s| s.stratum == name)
    }

    /// One line per stratum with the median scores, then performance.
    pub fn summary_text(&self) -> String {
        let mut s = format!("study {} ({} rows, {} seeds)\n", self.name, self.rows, self.seeds.len());
        for w in &self.warnings {
            s.push_str(&format!("warning: {w}\n"));
        }
        for b in &self.aggregate.bias_scores {
            s.push_str(&format!(
                "  {:<24} pre {} [{}, {}]  post {} [{}, {}]",
                b.stratum,
                BiasScore(b.pre.median).to_string_2(),
                BiasScore(b.pre.min).to_string_2(),
                BiasScore(b.pre.max).to_string_2(),
                BiasScore(b.post.median).to_string_2(),
                BiasScore(b.post.min).to_string_2(),
                BiasScore(b.post.max).to_string_2(),
            ));
            if let Some(t) = &b.true_values {
                s.push_str(&format!("  true {}", BiasScore(t.median).to_string_2()));
            }
            s.push('\n');
        }
        let a = &self.aggregate;
        s.push_str(&format!(
            "  {} pre {:.3}  post {:.3}\n  probe AUC pre {:.3}  post {:.3}\n",
            a.metric,
            a.performance_pre.median,
            a.performance_post.median,
            a.probe_auc_pre.median,
            a.probe_auc_post.median
        ));
        s
    }
}

impl BiasScore {
    fn to_string_2(self) -> String {
        format!("{self:.2}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::studies::synthetic::{make_synthetic, SyntheticSpec, PROTECTED, TARGET};
    use crate::studies::DataSource;

    #[test]
    fn summary_median() {
        let s = Summary::of(&[3.0, 1.0, 2.0]).unwrap();
        assert_eq!((s.median, s.min, s.max), (2.0, 1.0, 3.0));
        assert_eq!(Summary::of(&[4.0, 1.0, 2.0, 3.0]).unwrap().median, 2.5);
        assert_eq!(Summary::of(&[1.0, f64::INFINITY]).unwrap().max, f64::INFINITY);
        assert!(Summary::of(&[]).is_none());
    }

    fn config(seeds: Vec<u64>) -> StudyConfig {
        StudyConfig {
            name: "toy".into(),
            data: DataSource {
                file: "unused.csv".into(),
                sha256: "0".repeat(64),
                url: None,
                standin: false,
            },
            schema: Vec::new(),
            recipe: Vec::new(),
            protected: PROTECTED.into(),
            target: TARGET.into(),
            model: ModelKind::Logistic { train: Default::default() },
            debias: DebiasConfig { epochs: 10, ..Default::default() },
            seeds,
            audit: Default::default(),
            stratify: true,
            audit_on: AuditOn::All,
            debias_fit_on: DebiasFitOn::All,
            test_fraction: 0.3,
        }
    }

    #[test]
    fn repeated_seed_gives_identical_results() {
        let data = make_synthetic(&SyntheticSpec { n: 300, ..Default::default() }).unwrap();
        let r = run_prepared(&config(vec![7, 7]), &data.table).unwrap();
        assert_eq!(r.seeds.len(), 2);
        assert_eq!(
            serde_json::to_string(&r.seeds[0]).unwrap(),
            serde_json::to_string(&r.seeds[1]).unwrap()
        );
        assert_eq!(r.aggregate.bias_scores.len(), 2);
    }
}
