use crate::error::{Error, Result};
use crate::ml::{auc, fit_logistic, TrainConfig};
use crate::tabular::{split_indices, Column, DataTable, Encoder, Role, DEFAULT_TEST_FRACTION};

/// Test AUC of a fresh logistic probe predicting `protected` from every
/// role=feature column, on a 70/30 split stratified on the protected
/// column. More than two categories: mean one-vs-rest AUC.
pub fn leakage_probe(table: &DataTable, protected: &str, seed: u64) -> Result<f64> {
    leakage_probe_with(table, protected, seed, &TrainConfig::default())
}

pub fn leakage_probe_with(
    table: &DataTable,
    protected: &str,
    seed: u64,
    cfg: &TrainConfig,
) -> Result<f64> {
    let col = table.column(protected)?;
    let codes = col.as_codes().ok_or_else(|| Error::WrongKind {
        column: protected.to_string(),
        expected: "categorical or binary",
    })?;
    let codes: Vec<u32> = codes
        .iter()
        .map(|c| c.ok_or_else(|| Error::MissingCells(protected.to_string())))
        .collect::<Result<_>>()?;
    let mut present: Vec<u32> = codes.clone();
    present.sort_unstable();
    present.dedup();
    if present.len() < 2 {
        return Err(Error::SingleClass);
    }

    let features: Vec<Column> = table
        .columns()
        .iter()
        .filter(|c| c.spec.role == Role::Feature)
        .cloned()
        .collect();
    if features.is_empty() {
        return Err(Error::InvalidArgument("probe needs at least one feature column".into()));
    }
    let ft = DataTable::new(features)?;
    let split = split_indices(table.n_rows(), Some(&codes), DEFAULT_TEST_FRACTION, seed)?;
    let train = ft.select_rows(&split.train);
    let enc = Encoder::fit(&train)?;
    let x_train = enc.encode(&train)?.values;
    let x_test = enc.encode(&ft.select_rows(&split.test))?.values;

    // binary: one probe for the higher code; otherwise one per class
    let classes: Vec<u32> = if present.len() == 2 {
        vec![present[1]]
    } else {
        present
    };
    let mut total = 0.0;
    for &k in &classes {
        let y: Vec<f64> = split.train.iter().map(|&r| f64::from(u8::from(codes[r] == k))).collect();
        let model = fit_logistic(&x_train, &y, cfg)?;
        let scores = model.predict(&x_test)?;
        let pos: Vec<bool> = split.test.iter().map(|&r| codes[r] == k).collect();
        total += auc(&scores, &pos)?;
    }
    Ok(total / classes.len() as f64)
}
