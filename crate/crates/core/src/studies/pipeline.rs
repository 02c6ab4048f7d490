//! The downstream pipeline shared by the pre- and post-debias runs: fit an
//! encoder and a model on the training rows, predict every row.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ml::{accuracy, fit_linear, fit_logistic, r_squared, LinearModel, TrainConfig};
use crate::tabular::{ColumnData, DataTable, Encoder, Split};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelKind {
    Logistic {
        #[serde(default)]
        train: TrainConfig,
    },
    Linear,
    Ridge { lambda: f64 },
}

impl ModelKind {
    pub fn is_classifier(&self) -> bool {
        matches!(self, ModelKind::Logistic { .. })
    }

    pub fn metric(&self) -> &'static str {
        if self.is_classifier() {
            "accuracy"
        } else {
            "r2"
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub model: LinearModel,
    /// Model output for every row (probabilities for classifiers).
    pub predictions: Vec<f64>,
    /// Target as reals (0/1 for binary targets).
    pub target: Vec<f64>,
}

impl PipelineOutput {
    /// Accuracy or R² on the given rows.
    pub fn score_on(&self, rows: &[usize], kind: &ModelKind) -> Result<f64> {
        let p: Vec<f64> = rows.iter().map(|&r| self.predictions[r]).collect();
        let y: Vec<f64> = rows.iter().map(|&r| self.target[r]).collect();
        if kind.is_classifier() {
            accuracy(&p, &y, 0.5)
        } else {
            r_squared(&p, &y)
        }
    }
}

/// Target column as reals; binary targets map to 0/1.
pub fn target_values(table: &DataTable) -> Result<Vec<f64>> {
    let t = table.target()?;
    let v = match &t.data {
        ColumnData::Categorical(_) if t.spec.categories.len() != 2 => {
            return Err(Error::WrongKind {
                column: t.name().to_string(),
                expected: "binary or numeric target",
            })
        }
        _ => t.values_f64().expect("numeric or two-category"),
    };
    v.into_iter()
        .map(|x| x.ok_or_else(|| Error::MissingCells(t.name().to_string())))
        .collect()
}

/// Fits the model on `split.train` and predicts all rows. Only
/// role=feature columns are used.
pub fn fit_and_predict(table: &DataTable, split: &Split, kind: &ModelKind, seed: u64) -> Result<PipelineOutput> {
    let target = target_values(table)?;
    let train = table.select_rows(&split.train);
    let enc = Encoder::fit(&train)?;
    let x_train = enc.encode(&train)?.values;
    let y_train: Vec<f64> = split.train.iter().map(|&r| target[r]).collect();
    let model = match kind {
        ModelKind::Logistic { train } => {
            let cfg = TrainConfig { seed, ..*train };
            fit_logistic(&x_train, &y_train, &cfg)?
        }
        ModelKind::Linear => fit_linear(&x_train, &y_train, 0.0)?,
        ModelKind::Ridge { lambda } => fit_linear(&x_train, &y_train, *lambda)?,
    };
    let x_all = enc.encode(table)?.values;
    let predictions = model.predict(&x_all)?;
    Ok(PipelineOutput {
        model,
        predictions,
        target,
    })
}
