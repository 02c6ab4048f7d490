use std::path::{Path, PathBuf};

use clap::Args;

use fairprep::audit::{histogram_csv, paired_csv, paired_text, BiasTable};
use fairprep::studies::{run_study, RunOptions, StudyConfig, StudyResult, DATA_DIR_ENV};

use crate::io::{require_file, write_atomic, write_json, CliResult, Failure};

#[derive(Debug, Args)]
pub struct StudyArgs {
    /// Study config JSON; its data file is looked up in `data/` beside it
    #[arg(long)]
    config: PathBuf,
    /// Run seeds 1..=N instead of the configured list
    #[arg(long)]
    seeds: Option<u64>,
    /// Output directory (created if missing)
    #[arg(long)]
    out: PathBuf,
    /// Directory searched for the full dataset before the bundled copy
    /// [default: $FAIRPREP_DATA_DIR]
    #[arg(long)]
    data_dir: Option<PathBuf>,
}

fn phases<'a>(pre: &'a BiasTable, post: &'a BiasTable, truth: Option<&'a BiasTable>) -> Vec<(&'static str, &'a BiasTable)> {
    let mut v = Vec::with_capacity(3);
    if let Some(t) = truth {
        v.push(("true", t));
    }
    v.push(("pre", pre));
    v.push(("post", post));
    v
}

fn aggregate_csv(r: &StudyResult) -> String {
    let mut s = String::from("stratum,phase,median,min,max\n");
    for b in &r.aggregate.bias_scores {
        let mut rows = vec![("pre", b.pre), ("post", b.post)];
        if let Some(t) = b.true_values {
            rows.insert(0, ("true", t));
        }
        for (phase, v) in rows {
            s.push_str(&format!("{},{phase},{},{},{}\n", b.stratum, v.median, v.min, v.max));
        }
    }
    let a = &r.aggregate;
    for (phase, v) in [("pre", a.performance_pre), ("post", a.performance_post)] {
        s.push_str(&format!("{},{phase},{},{},{}\n", a.metric, v.median, v.min, v.max));
    }
    for (phase, v) in [("pre", a.probe_auc_pre), ("post", a.probe_auc_post)] {
        s.push_str(&format!("probe_auc,{phase},{},{},{}\n", v.median, v.min, v.max));
    }
    s
}

fn write_outputs(r: &StudyResult, out: &Path) -> CliResult {
    write_json(&out.join("result.json"), r)?;
    write_atomic(&out.join("summary.txt"), r.summary_text().as_bytes())?;
    write_atomic(&out.join("aggregate.csv"), aggregate_csv(r).as_bytes())?;
    for s in &r.seeds {
        let dir = out.join(format!("seed-{}", s.seed));
        std::fs::create_dir_all(&dir).map_err(|e| Failure::data(format!("{}: {e}", dir.display())))?;
        let p = phases(&s.pre.bias_table, &s.post.bias_table, s.pre.true_values.as_ref());
        write_atomic(&dir.join("bias_table.csv"), paired_csv(&p)?.as_bytes())?;
        write_atomic(&dir.join("bias_table.txt"), paired_text(&p)?.as_bytes())?;
        write_atomic(&dir.join("histograms_pre.csv"), histogram_csv(&s.pre.histograms)?.as_bytes())?;
        write_atomic(&dir.join("histograms_post.csv"), histogram_csv(&s.post.histograms)?.as_bytes())?;
    }
    Ok(())
}

pub fn run(a: &StudyArgs) -> CliResult {
    require_file(&a.config, "config")?;
    if a.seeds == Some(0) {
        return Err(Failure::usage("--seeds must be >= 1"));
    }
    let cfg = StudyConfig::load(&a.config)?;
    let bundled = a.config.parent().unwrap_or(Path::new(".")).join("data");
    let cache_dir = a
        .data_dir
        .clone()
        .or_else(|| std::env::var_os(DATA_DIR_ENV).map(PathBuf::from));
    let opts = RunOptions {
        seeds: a.seeds.map(|n| (1..=n).collect()),
        cache_dir,
    };
    std::fs::create_dir_all(&a.out).map_err(|e| Failure::usage(format!("--out {}: {e}", a.out.display())))?;
    let result = run_study(&cfg, &bundled, &opts)?;
    write_outputs(&result, &a.out)?;
    print!("{}", result.summary_text());
    Ok(())
}
