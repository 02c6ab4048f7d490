//! Replays the checked-in fuzz seeds through the same entry points as the
//! fuzz targets, so they stay exercised on stable.

use std::fs;
use std::path::PathBuf;

use fairprep::audit::{AuditInput, EstimateColumns};
use fairprep::debias::DebiasModel;
use fairprep::ml::ModelFile;
use fairprep::studies::StudyConfig;
use fairprep::tabular::{parse_csv, parse_schema, to_csv_string, ColumnSpec, Role};

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

fn text(b: &[u8]) -> &str {
    std::str::from_utf8(b).unwrap()
}

#[test]
fn csv_seeds() {
    let schema = [
        ColumnSpec::numeric("x", Role::Feature),
        ColumnSpec::categorical("c", Role::Feature, Vec::<String>::new()),
        ColumnSpec::binary("g", Role::Protected),
    ];
    for (name, data) in seeds("parse_csv") {
        let r = parse_csv(&data, &schema);
        assert_eq!(r.is_ok(), !name.starts_with("short") && !name.starts_with("bad"), "{name}: {r:?}");
        if let Ok(t) = r {
            let back = parse_csv(to_csv_string(&t).unwrap().as_bytes(), &t.schema()).unwrap();
            assert_eq!(back, t, "{name}");
        }
    }
}

#[test]
fn schema_seeds() {
    for (name, data) in seeds("parse_schema") {
        assert_eq!(parse_schema(text(&data)).is_ok(), name == "mixed.json", "{name}");
    }
}

#[test]
fn model_seeds() {
    for (name, data) in seeds("model_file") {
        ModelFile::from_json(text(&data)).unwrap().to_mlp().unwrap_or_else(|e| panic!("{name}: {e}"));
    }
    for (name, data) in seeds("debias_model") {
        let m = DebiasModel::from_json(text(&data)).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(m.to_json().unwrap().trim(), text(&data).trim());
    }
}

#[test]
fn config_seeds() {
    for (name, data) in seeds("study_config") {
        StudyConfig::from_json(text(&data)).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn estimate_seeds() {
    for (name, data) in seeds("estimates_csv") {
        let cols = EstimateColumns { estimate: "estimate", group: "group", stratum: Some("stratum") };
        let r = AuditInput::from_csv(&data, &cols);
        assert_eq!(r.is_ok(), name == "strata.csv", "{name}");
    }
}
