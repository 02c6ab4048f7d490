//! Synthetic tables with planted bias and known fair labels.
//!
//! Fair features are standard normal and the fair label is drawn from a
//! logistic rule on them. The observed label is the fair label, except that
//! protected-group rows whose fair label is 0 are flipped to the adverse
//! outcome 1 with probability β. Proxy columns blend the protected
//! indicator with noise: `ρ·g + √(1−ρ²)·ε/2`, so ρ = 1 copies `g`.

use serde::{Deserialize, Serialize};

use super::pipeline::{fit_and_predict, ModelKind};
use crate::audit::{bias_table, group_stats, BiasScore};
use crate::debias::{leakage_probe, train_debiaser, DebiasConfig};
use crate::error::{Error, Result};
use crate::ml::{accuracy, sigmoid};
use crate::rng::{streams, Rng};
use crate::tabular::{split_table_indices, Column, ColumnSpec, DataTable, Role, DEFAULT_TEST_FRACTION};

pub const PROTECTED: &str = "group";
pub const TARGET: &str = "outcome";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticSpec {
    pub n: usize,
    /// Fair continuous features.
    pub d: usize,
    /// Proxy columns.
    pub proxies: usize,
    /// Protected-group prevalence.
    pub p: f64,
    pub rho: f64,
    pub beta: f64,
    /// Scale of the logistic label rule.
    pub signal: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            n: 2000,
            d: 3,
            proxies: 2,
            p: 0.5,
            rho: 0.8,
            beta: 0.3,
            signal: 2.0,
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(Error::InvalidArgument("p must be in (0, 1)".into()));
        }
        if !(0.0..1.0).contains(&self.beta) {
            return Err(Error::InvalidArgument("beta must be in [0, 1)".into()));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::InvalidArgument("rho must be in [0, 1]".into()));
        }
        if self.p * (self.n as f64) < 10.0 || (1.0 - self.p) * (self.n as f64) < 10.0 {
            return Err(Error::InvalidArgument("p·n < 10: degenerate spec".into()));
        }
        if self.d == 0 {
            return Err(Error::InvalidArgument("need at least one fair feature".into()));
        }
        if !self.signal.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticData {
    pub table: DataTable,
    pub fair_labels: Vec<u32>,
    /// Rows whose observed label was flipped.
    pub flipped: usize,
}

pub fn make_synthetic(spec: &SyntheticSpec) -> Result<SyntheticData> {
    spec.validate()?;
    let mut rng = Rng::stream(spec.seed, streams::SYNTHETIC);
    let n = spec.n;
    let w = spec.signal / (spec.d as f64).sqrt();
    let noise = (1.0 - spec.rho * spec.rho).max(0.0).sqrt() * 0.5;
    let mut fair_cols = vec![Vec::with_capacity(n); spec.d];
    let mut proxy_cols = vec![Vec::with_capacity(n); spec.proxies];
    let mut group = Vec::with_capacity(n);
    let mut fair_labels = Vec::with_capacity(n);
    let mut observed = Vec::with_capacity(n);
    let mut flipped = 0;
    for _ in 0..n {
        let g = rng.bernoulli(spec.p);
        let mut s = 0.0;
        for col in fair_cols.iter_mut() {
            let x = rng.normal();
            s += w * x;
            col.push(Some(x));
        }
        let gf = f64::from(u8::from(g));
        for col in proxy_cols.iter_mut() {
            col.push(Some(spec.rho * gf + noise * rng.normal()));
        }
        let fair = u32::from(rng.bernoulli(sigmoid(s)));
        // draw unconditionally so β does not shift the stream
        let flip = rng.bernoulli(spec.beta);
        let obs = if g && fair == 0 && flip {
            flipped += 1;
            1
        } else {
            fair
        };
        group.push(Some(u32::from(g)));
        fair_labels.push(fair);
        observed.push(Some(obs));
    }
    let mut columns = Vec::new();
    for (j, v) in fair_cols.into_iter().enumerate() {
        columns.push(Column::numeric(ColumnSpec::numeric(format!("x{}", j + 1), Role::Feature), v));
    }
    for (j, v) in proxy_cols.into_iter().enumerate() {
        columns.push(Column::numeric(ColumnSpec::numeric(format!("proxy{}", j + 1), Role::Feature), v));
    }
    columns.push(Column::categorical(ColumnSpec::binary(PROTECTED, Role::Protected), group));
    columns.push(Column::categorical(ColumnSpec::binary(TARGET, Role::Target), observed));
    Ok(SyntheticData {
        table: DataTable::new(columns)?,
        fair_labels,
        flipped,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthPhase {
    pub probe_auc: f64,
    /// Test-row accuracy against the hidden fair labels.
    pub fair_accuracy: f64,
    /// Test-row accuracy against the observed labels.
    pub observed_accuracy: f64,
    /// Bias score per fair-label stratum, over all rows.
    pub bias_scores: Vec<(String, BiasScore)>,
    /// Bias score with all rows in one stratum.
    pub bias_score_all: BiasScore,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthCheck {
    pub spec: SyntheticSpec,
    pub debias: DebiasConfig,
    pub model: ModelKind,
    pub flipped: usize,
    pub pre: SynthPhase,
    pub post: SynthPhase,
    pub bias_detected: bool,
}

fn phase(
    table: &DataTable,
    fair: &[u32],
    model: &ModelKind,
    seed: u64,
) -> Result<SynthPhase> {
    let split = split_table_indices(table, DEFAULT_TEST_FRACTION, seed)?;
    let out = fit_and_predict(table, &split, model, seed)?;
    let p: Vec<f64> = split.test.iter().map(|&r| out.predictions[r]).collect();
    let y_fair: Vec<f64> = split.test.iter().map(|&r| f64::from(fair[r])).collect();
    let y_obs: Vec<f64> = split.test.iter().map(|&r| out.target[r]).collect();
    let groups = table.column(PROTECTED)?.labels();
    let strata: Vec<String> = fair.iter().map(|f| format!("fair={f}")).collect();
    let stats = group_stats(&out.predictions, &groups, &strata)?;
    let bt = bias_table(&stats, Some(("1", "0")))?;
    let all = vec![crate::audit::ALL_STRATUM.to_string(); table.n_rows()];
    let bt_all = bias_table(&group_stats(&out.predictions, &groups, &all)?, Some(("1", "0")))?;
    Ok(SynthPhase {
        probe_auc: leakage_probe(table, PROTECTED, seed)?,
        fair_accuracy: accuracy(&p, &y_fair, 0.5)?,
        observed_accuracy: accuracy(&p, &y_obs, 0.5)?,
        bias_scores: bt.scores(),
        bias_score_all: bt_all.rows[0].bias_score,
    })
}

/// Downstream model on the biased table and on its debiased version, both
/// judged against the fair labels.
pub fn synth_check(spec: &SyntheticSpec, debias: &DebiasConfig, model: &ModelKind) -> Result<SynthCheck> {
    let data = make_synthetic(spec)?;
    let pre = phase(&data.table, &data.fair_labels, model, spec.seed)?;
    let (dm, _) = train_debiaser(&data.table, debias)?;
    let debiased = dm.transform(&data.table)?;
    let post = phase(&debiased, &data.fair_labels, model, spec.seed)?;
    // chance-level probe and no planted flips: nothing to remove
    let bias_detected = data.flipped > 0 || pre.probe_auc > 0.6;
    Ok(SynthCheck {
        spec: spec.clone(),
        debias: debias.clone(),
        model: model.clone(),
        flipped: data.flipped,
        pre,
        post,
        bias_detected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn codes(t: &DataTable, c: &str) -> Vec<u32> {
        t.column(c).unwrap().as_codes().unwrap().iter().map(|c| c.unwrap()).collect()
    }

    #[test]
    fn flips_only_protected_negatives() {
        let spec = SyntheticSpec { seed: 3, ..Default::default() };
        let d = make_synthetic(&spec).unwrap();
        let g = codes(&d.table, PROTECTED);
        let y = codes(&d.table, TARGET);
        let mut count = 0;
        for r in 0..spec.n {
            if y[r] != d.fair_labels[r] {
                assert_eq!((g[r], d.fair_labels[r], y[r]), (1, 0, 1));
                count += 1;
            }
        }
        assert_eq!(count, d.flipped);
        let eligible = (0..spec.n).filter(|&r| g[r] == 1 && d.fair_labels[r] == 0).count();
        let rate = count as f64 / eligible as f64;
        assert!((rate - 0.3).abs() < 0.06, "{rate}");

        // β only changes the observed label
        let clean = make_synthetic(&SyntheticSpec { beta: 0.0, ..spec.clone() }).unwrap();
        assert_eq!(clean.flipped, 0);
        assert_eq!(clean.fair_labels, d.fair_labels);
        assert_eq!(clean.table.column("proxy1").unwrap(), d.table.column("proxy1").unwrap());
    }

    #[test]
    fn probe_tracks_rho() {
        let copy = make_synthetic(&SyntheticSpec { rho: 1.0, ..Default::default() }).unwrap();
        assert!(leakage_probe(&copy.table, PROTECTED, 0).unwrap() >= 0.95);
        let null = make_synthetic(&SyntheticSpec { rho: 0.0, ..Default::default() }).unwrap();
        let auc = leakage_probe(&null.table, PROTECTED, 0).unwrap();
        assert!((0.4..=0.6).contains(&auc), "{auc}");
    }

    #[test]
    fn degenerate_specs_rejected() {
        for spec in [
            SyntheticSpec { p: 0.0, ..Default::default() },
            SyntheticSpec { n: 15, ..Default::default() },
            SyntheticSpec { beta: 1.0, ..Default::default() },
            SyntheticSpec { rho: 1.5, ..Default::default() },
            SyntheticSpec { d: 0, ..Default::default() },
        ] {
            assert!(make_synthetic(&spec).is_err());
        }
    }
}
