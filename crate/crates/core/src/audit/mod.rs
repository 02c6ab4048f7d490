//! Bias audit of downstream-model estimates.
//!
//! For each stratum (usually the true label) the estimates of two protected
//! groups are summarized by mean and population standard deviation, and the
//! bias score is `|μ_A − μ_B| / ((σ_A + σ_B) / 2)`.

mod histogram;
mod report;
mod stats;

pub use histogram::{histogram, Histogram};
pub use report::{
    audit, histogram_csv, paired_csv, paired_text, AuditInput, AuditOptions, AuditReport,
    EstimateColumns, HistogramCell, Performance, RunMeta,
};
pub use stats::{
    bias_score, bias_score_from, bias_table, group_stats, BiasRow, BiasScore, BiasTable,
    GroupStats,
};

/// Stratum label used when no stratification is requested.
pub const ALL_STRATUM: &str = "all";
