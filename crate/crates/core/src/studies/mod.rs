//! Case-study recipes and the synthetic bias-injection harness.

mod config;
mod pipeline;
mod runner;
pub mod standin;
mod synthetic;

pub use config::{
    prepare, prepare_table, resolve_data, sha256_file, AuditOn, DataSource, DebiasFitOn,
    ResolvedData, StudyConfig, DATA_DIR_ENV,
};
pub use pipeline::{fit_and_predict, target_values, ModelKind, PipelineOutput};
pub use runner::{
    run_prepared, run_study, Aggregate, RunOptions, SeedResult, StratumSummary, StudyResult, Summary,
};
pub use synthetic::{make_synthetic, synth_check, SynthCheck, SynthPhase, SyntheticData, SyntheticSpec};
