//! `fairprep` command-line tool.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

mod audit_cmd;
mod debias_cmd;
mod io;
mod study_cmd;
mod synth_cmd;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "fairprep", version, about = "Adversarial debiasing and bias audits for tabular data")]
struct Cli {
    /// Never fetch datasets over the network (no command does; accepted for scripts)
    #[arg(long, global = true)]
    offline: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train a debiaser on a CSV and write the debiased copy
    Debias(debias_cmd::DebiasArgs),
    /// Bias table and histograms for a file of model estimates
    Audit(audit_cmd::AuditArgs),
    /// Run a case-study config over its seeds
    RunStudy(study_cmd::StudyArgs),
    /// Debias a synthetic table with planted bias and compare against its fair labels
    SynthCheck(synth_cmd::SynthArgs),
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { io::EXIT_USAGE } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let result = match &cli.command {
        Command::Debias(a) => debias_cmd::run(a),
        Command::Audit(a) => audit_cmd::run(a),
        Command::RunStudy(a) => study_cmd::run(a),
        Command::SynthCheck(a) => synth_cmd::run(a),
    };
    if let Err(f) = result {
        eprintln!("error: {f}");
        std::process::exit(f.code);
    }
}
