use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::histogram::{histogram, Histogram};
use super::stats::{bias_table, group_stats, BiasTable, GroupStats};
use super::ALL_STRATUM;
use crate::error::{Error, Result};
use crate::tabular::DataTable;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AuditOptions {
    pub bins: usize,
    /// Histogram range; `None` spans the observed values.
    pub range: Option<[f64; 2]>,
    /// The two groups of the bias table when more than two are present.
    pub contrast: Option<[String; 2]>,
    /// Display names for stratum labels, e.g. `"1" → "recidivist"`.
    pub stratum_names: BTreeMap<String, String>,
    /// Also tabulate the target values themselves (regression studies).
    pub true_values: bool,
}

impl Default for AuditOptions {
    fn default() -> Self {
        Self {
            bins: 20,
            range: None,
            contrast: None,
            stratum_names: BTreeMap::new(),
            true_values: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Performance {
    /// `accuracy` or `r2`.
    pub metric: String,
    pub value: f64,
    /// Which rows the number was computed on.
    pub split: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub label: String,
    pub seed: u64,
    pub config_digest: String,
}

impl RunMeta {
    pub fn new(label: impl Into<String>, seed: u64, config: &impl Serialize) -> Result<Self> {
        Ok(Self {
            label: label.into(),
            seed,
            config_digest: digest(config)?,
        })
    }
}

/// sha256 of the compact JSON form.
pub(crate) fn digest(value: &impl Serialize) -> Result<String> {
    let bytes = serde_json::to_vec(value)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramCell {
    pub group: String,
    pub stratum: String,
    pub histogram: Histogram,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub bias_table: BiasTable,
    pub group_stats: Vec<GroupStats>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub true_values: Option<BiasTable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub performance: Option<Performance>,
    pub histograms: Vec<HistogramCell>,
    pub meta: RunMeta,
}

/// Estimates with their group and stratum labels, ready to audit.
#[derive(Debug, Clone)]
pub struct AuditInput {
    pub estimates: Vec<f64>,
    pub groups: Vec<String>,
    pub strata: Vec<String>,
    pub true_values: Option<Vec<f64>>,
}

impl AuditInput {
    /// Labels from `table`: groups from the protected column, strata from
    /// `stratum` (or a single `all` stratum).
    pub fn from_table(
        estimates: Vec<f64>,
        table: &DataTable,
        protected: &str,
        stratum: Option<&str>,
        opts: &AuditOptions,
    ) -> Result<Self> {
        if estimates.len() != table.n_rows() {
            return Err(Error::Dimension(format!(
                "{} estimates for {} rows",
                estimates.len(),
                table.n_rows()
            )));
        }
        let groups = table.column(protected)?.labels();
        let strata = match stratum {
            Some(name) => table
                .column(name)?
                .labels()
                .into_iter()
                .map(|l| opts.stratum_names.get(&l).cloned().unwrap_or(l))
                .collect(),
            None => vec![ALL_STRATUM.to_string(); table.n_rows()],
        };
        let true_values = if opts.true_values {
            let t = table.target()?;
            let v = t.values_f64().ok_or_else(|| Error::WrongKind {
                column: t.name().to_string(),
                expected: "numeric",
            })?;
            Some(
                v.into_iter()
                    .map(|x| x.ok_or_else(|| Error::MissingCells(t.name().to_string())))
                    .collect::<Result<Vec<f64>>>()?,
            )
        } else {
            None
        };
        Ok(Self {
            estimates,
            groups,
            strata,
            true_values,
        })
    }
}

/// Column names of a standalone estimates file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EstimateColumns<'a> {
    pub estimate: &'a str,
    pub group: &'a str,
    pub stratum: Option<&'a str>,
}

impl AuditInput {
    /// Reads estimates, group labels and optional strata from CSV text.
    /// Every estimate must be a finite number and every label non-empty.
    pub fn from_csv(text: &[u8], cols: &EstimateColumns<'_>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().from_reader(text);
        let header = rdr.headers()?.clone();
        let find = |name: &str| {
            header
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::UnknownColumn(name.to_string()))
        };
        let ei = find(cols.estimate)?;
        let gi = find(cols.group)?;
        let si = cols.stratum.map(find).transpose()?;
        let mut input = Self {
            estimates: Vec::new(),
            groups: Vec::new(),
            strata: Vec::new(),
            true_values: None,
        };
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let cell = |i: usize, name: &str| {
                rec.get(i)
                    .map(str::trim)
                    .filter(|c| !c.is_empty() && *c != "NA")
                    .ok_or_else(|| Error::MissingCells(format!("{name} (row {})", line + 1)))
            };
            let e = cell(ei, cols.estimate)?;
            let x: f64 = e.parse().map_err(|_| {
                Error::InvalidArgument(format!("row {}: `{e}` is not a number", line + 1))
            })?;
            if !x.is_finite() {
                return Err(Error::NonFinite);
            }
            input.estimates.push(x);
            input.groups.push(cell(gi, cols.group)?.to_string());
            input.strata.push(match si {
                Some(i) => cell(i, cols.stratum.unwrap_or_default())?.to_string(),
                None => ALL_STRATUM.to_string(),
            });
        }
        if input.estimates.is_empty() {
            return Err(Error::EmptyInput);
        }
        Ok(input)
    }
}

pub fn audit(
    input: &AuditInput,
    performance: Option<Performance>,
    opts: &AuditOptions,
    meta: RunMeta,
) -> Result<AuditReport> {
    let stats = group_stats(&input.estimates, &input.groups, &input.strata)?;
    let contrast = opts.contrast.as_ref().map(|[a, b]| (a.as_str(), b.as_str()));
    let table = bias_table(&stats, contrast)?;
    let true_values = match &input.true_values {
        Some(v) => {
            let ts = group_stats(v, &input.groups, &input.strata)?;
            Some(bias_table(&ts, contrast)?)
        }
        None => None,
    };
    let [lo, hi] = match opts.range {
        Some(r) => r,
        None => {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for &x in &input.estimates {
                lo = lo.min(x);
                hi = hi.max(x);
            }
            if hi > lo {
                [lo, hi]
            } else {
                [lo - 0.5, hi + 0.5]
            }
        }
    };
    let mut histograms = Vec::with_capacity(stats.len());
    for s in &stats {
        let vals: Vec<f64> = (0..input.estimates.len())
            .filter(|&i| input.groups[i] == s.group && input.strata[i] == s.stratum)
            .map(|i| input.estimates[i])
            .collect();
        histograms.push(HistogramCell {
            group: s.group.clone(),
            stratum: s.stratum.clone(),
            histogram: histogram(&vals, opts.bins, lo, hi)?,
        });
    }
    Ok(AuditReport {
        bias_table: table,
        group_stats: stats,
        true_values,
        performance,
        histograms,
        meta,
    })
}

/// Long-form CSV of one or more bias tables side by side, one row per
/// (stratum, phase, statistic). Columns: the two group names then the
/// combined value (μ diff, σ average or score).
pub fn paired_csv(phases: &[(&str, &BiasTable)]) -> Result<String> {
    let Some((_, first)) = phases.first() else {
        return Err(Error::EmptyInput);
    };
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(["stratum", "phase", "statistic", &first.group_a, &first.group_b, "combined"])?;
    for row in &first.rows {
        for (phase, t) in phases {
            let r = t.row(&row.stratum).ok_or_else(|| {
                Error::SchemaMismatch(format!("stratum `{}` missing from {phase}", row.stratum))
            })?;
            w.write_record([
                &r.stratum,
                *phase,
                "mu",
                &r.mu_a.to_string(),
                &r.mu_b.to_string(),
                &r.mu_diff.to_string(),
            ])?;
            w.write_record([
                &r.stratum,
                *phase,
                "sigma",
                &r.sigma_a.to_string(),
                &r.sigma_b.to_string(),
                &r.sigma_avg.to_string(),
            ])?;
            w.write_record([&r.stratum, *phase, "score", "", "", &r.bias_score.to_string()])?;
        }
    }
    finish(w)
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w
        .into_inner()
        .map_err(|e| Error::InvalidArgument(format!("csv buffer: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv of utf-8 input"))
}

/// Aligned text version of [`paired_csv`], two decimals.
pub fn paired_text(phases: &[(&str, &BiasTable)]) -> Result<String> {
    let Some((_, first)) = phases.first() else {
        return Err(Error::EmptyInput);
    };
    let heads = [first.group_a.as_str(), first.group_b.as_str(), "diff/avg"];
    let w = heads.iter().map(|h| h.len()).max().unwrap_or(8).max(8) + 2;
    let mut out = String::new();
    for row in &first.rows {
        out.push_str(&format!("stratum: {}\n", row.stratum));
        out.push_str(&format!("{:<8}", ""));
        for (phase, _) in phases {
            out.push_str(&format!("{:<width$}", phase, width = 3 * w));
        }
        out.push('\n');
        out.push_str(&format!("{:<8}", ""));
        for _ in phases {
            for h in heads {
                out.push_str(&format!("{h:>w$}"));
            }
        }
        out.push('\n');
        let lines: [(&str, fn(&super::BiasRow) -> [String; 3]); 3] = [
            ("mu", |r| [f2(r.mu_a), f2(r.mu_b), f2(r.mu_diff)]),
            ("sigma", |r| [f2(r.sigma_a), f2(r.sigma_b), f2(r.sigma_avg)]),
            ("score", |r| [String::new(), String::new(), format!("{:.2}", r.bias_score)]),
        ];
        for (name, cells) in lines {
            out.push_str(&format!("{name:<8}"));
            for (phase, t) in phases {
                let r = t.row(&row.stratum).ok_or_else(|| {
                    Error::SchemaMismatch(format!("stratum `{}` missing from {phase}", row.stratum))
                })?;
                for c in cells(r) {
                    out.push_str(&format!("{c:>w$}"));
                }
            }
            out.push('\n');
        }
        out.push('\n');
    }
    Ok(out)
}

fn f2(x: f64) -> String {
    format!("{x:.2}")
}

/// `bin_lo,bin_hi,group,stratum,count` for every cell of a report.
pub fn histogram_csv(cells: &[HistogramCell]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(["bin_lo", "bin_hi", "group", "stratum", "count"])?;
    for c in cells {
        for (b, count) in c.histogram.counts.iter().enumerate() {
            let (lo, hi) = c.histogram.edges(b);
            w.write_record([
                lo.to_string(),
                hi.to_string(),
                c.group.clone(),
                c.stratum.clone(),
                count.to_string(),
            ])?;
        }
    }
    finish(w)
}
