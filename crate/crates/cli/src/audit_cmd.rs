use std::path::PathBuf;

use clap::Args;

use fairprep::audit::{audit, histogram_csv, paired_csv, paired_text, AuditInput, AuditOptions, EstimateColumns, RunMeta};

use crate::io::{read_file, require_file, require_parent, split_list, write_atomic, write_json, CliResult, Failure};

#[derive(Debug, Args)]
pub struct AuditArgs {
    /// CSV with one row per model estimate
    #[arg(long)]
    estimates: PathBuf,
    /// Column holding the protected group label
    #[arg(long)]
    groups: String,
    /// Column holding the stratum label (e.g. the true outcome)
    #[arg(long)]
    strata: Option<String>,
    /// Column holding the estimates
    #[arg(long, default_value = "estimate")]
    estimate_column: String,
    /// The two groups to compare, `A,B`
    #[arg(long)]
    contrast: Option<String>,
    #[arg(long, default_value_t = 20)]
    bins: usize,
    /// Histogram range `lo,hi`; defaults to the observed range
    #[arg(long, allow_hyphen_values = true)]
    range: Option<String>,
    /// Report JSON
    #[arg(long)]
    report: Option<PathBuf>,
    /// Bias table as CSV
    #[arg(long)]
    table_csv: Option<PathBuf>,
    /// Per-cell histograms as CSV
    #[arg(long)]
    histograms_csv: Option<PathBuf>,
}

fn options(a: &AuditArgs) -> CliResult<AuditOptions> {
    let contrast = match &a.contrast {
        Some(c) => match split_list(c).as_slice() {
            [x, y] => Some([x.clone(), y.clone()]),
            _ => return Err(Failure::usage("--contrast takes exactly two groups: A,B")),
        },
        None => None,
    };
    let range = match &a.range {
        Some(r) => {
            let v: Vec<f64> = split_list(r)
                .iter()
                .map(|x| x.parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| Failure::usage("--range takes two numbers: lo,hi"))?;
            match v.as_slice() {
                [lo, hi] if lo < hi && lo.is_finite() && hi.is_finite() => Some([*lo, *hi]),
                _ => return Err(Failure::usage("--range takes two numbers lo < hi")),
            }
        }
        None => None,
    };
    if a.bins == 0 {
        return Err(Failure::usage("--bins must be >= 1"));
    }
    Ok(AuditOptions {
        bins: a.bins,
        range,
        contrast,
        ..Default::default()
    })
}

pub fn run(a: &AuditArgs) -> CliResult {
    require_file(&a.estimates, "estimates")?;
    for out in [a.report.as_ref(), a.table_csv.as_ref(), a.histograms_csv.as_ref()].into_iter().flatten() {
        require_parent(out)?;
    }
    let opts = options(a)?;
    let cols = EstimateColumns {
        estimate: &a.estimate_column,
        group: &a.groups,
        stratum: a.strata.as_deref(),
    };
    let input = AuditInput::from_csv(&read_file(&a.estimates)?, &cols).map_err(|e| match e {
        fairprep::Error::UnknownColumn(c) => Failure::usage(format!("no column `{c}` in the estimates file")),
        e => e.into(),
    })?;
    let meta = RunMeta::new("audit", 0, &opts)?;
    let report = audit(&input, None, &opts, meta)?;
    if let Some(r) = &a.report {
        write_json(r, &report)?;
    }
    let phases = [("estimates", &report.bias_table)];
    if let Some(p) = &a.table_csv {
        write_atomic(p, paired_csv(&phases)?.as_bytes())?;
    }
    if let Some(p) = &a.histograms_csv {
        write_atomic(p, histogram_csv(&report.histograms)?.as_bytes())?;
    }
    print!("{}", paired_text(&phases)?);
    Ok(())
}
