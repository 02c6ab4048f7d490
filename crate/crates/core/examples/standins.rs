//! Regenerates the bundled stand-in CSVs: `cargo run --example standins -- studies/data`
use std::path::PathBuf;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "studies/data".into()));
    for name in fairprep::studies::standin::STANDINS {
        let path = dir.join(format!("{name}.csv"));
        std::fs::write(&path, fairprep::studies::standin::generate(name)?)?;
        println!("{}", path.display());
    }
    Ok(())
}
