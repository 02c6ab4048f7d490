//! Table ⇄ design-matrix conversion.
//!
//! Feature columns (role = feature) become the design block: numeric columns
//! are imputed with the fitting mean and standardized with the population
//! standard deviation (constant columns use std = 1); categorical and binary
//! columns become one-hot groups, with an extra `missing` slot when the
//! fitting data had missing cells. Protected and target columns are carried
//! alongside unchanged so that decoding restores the full source schema.

use serde::{Deserialize, Serialize};

use super::schema::{ColumnSpec, Role};
use super::table::{Column, ColumnData, DataTable};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Where a design column comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DesignColumn {
    /// Standardized numeric source column.
    Identity { source: String },
    /// One-hot indicator; `category: None` is the missing slot.
    OneHot {
        source: String,
        category: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleParams {
    pub mean: f64,
    pub std: f64,
}

/// Per-source-column encoding fitted on a table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FeatureEncoding {
    Numeric {
        column: String,
        scale: ScaleParams,
    },
    OneHot {
        column: String,
        categories: Vec<String>,
        missing_slot: bool,
    },
}

impl FeatureEncoding {
    pub fn column(&self) -> &str {
        match self {
            FeatureEncoding::Numeric { column, .. } | FeatureEncoding::OneHot { column, .. } => {
                column
            }
        }
    }

    pub fn width(&self) -> usize {
        match self {
            FeatureEncoding::Numeric { .. } => 1,
            FeatureEncoding::OneHot {
                categories,
                missing_slot,
                ..
            } => categories.len() + usize::from(*missing_slot),
        }
    }
}

/// A contiguous block of design columns belonging to one source column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Block {
    pub start: usize,
    pub width: usize,
    pub one_hot: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Encoder {
    schema: Vec<ColumnSpec>,
    features: Vec<FeatureEncoding>,
}

impl Encoder {
    /// Fits imputation means, scalers and one-hot vocabularies on `table`.
    pub fn fit(table: &DataTable) -> Result<Self> {
        let mut features = Vec::new();
        for col in table.columns() {
            match col.spec.role {
                Role::Drop => return Err(Error::DropColumnPresent(col.spec.name.clone())),
                Role::Feature => {}
                _ => continue,
            }
            let enc = match &col.data {
                ColumnData::Numeric(v) => FeatureEncoding::Numeric {
                    column: col.spec.name.clone(),
                    scale: fit_scale(v).ok_or_else(|| Error::AllMissing(col.spec.name.clone()))?,
                },
                ColumnData::Categorical(v) => FeatureEncoding::OneHot {
                    column: col.spec.name.clone(),
                    categories: col.spec.categories.clone(),
                    missing_slot: v.iter().any(Option::is_none),
                },
            };
            features.push(enc);
        }
        Ok(Self {
            schema: table.schema(),
            features,
        })
    }

    pub fn schema(&self) -> &[ColumnSpec] {
        &self.schema
    }

    pub fn features(&self) -> &[FeatureEncoding] {
        &self.features
    }

    pub fn width(&self) -> usize {
        self.features.iter().map(FeatureEncoding::width).sum()
    }

    pub fn blocks(&self) -> Vec<Block> {
        let mut start = 0;
        self.features
            .iter()
            .map(|f| {
                let b = Block {
                    start,
                    width: f.width(),
                    one_hot: matches!(f, FeatureEncoding::OneHot { .. }),
                };
                start += b.width;
                b
            })
            .collect()
    }

    pub fn column_map(&self) -> Vec<DesignColumn> {
        let mut map = Vec::with_capacity(self.width());
        for f in &self.features {
            match f {
                FeatureEncoding::Numeric { column, .. } => map.push(DesignColumn::Identity {
                    source: column.clone(),
                }),
                FeatureEncoding::OneHot {
                    column,
                    categories,
                    missing_slot,
                } => {
                    for c in categories {
                        map.push(DesignColumn::OneHot {
                            source: column.clone(),
                            category: Some(c.clone()),
                        });
                    }
                    if *missing_slot {
                        map.push(DesignColumn::OneHot {
                            source: column.clone(),
                            category: None,
                        });
                    }
                }
            }
        }
        map
    }

    pub fn scaler(&self) -> Vec<ScaleParams> {
        let mut out = Vec::with_capacity(self.width());
        for f in &self.features {
            match f {
                FeatureEncoding::Numeric { scale, .. } => out.push(*scale),
                FeatureEncoding::OneHot { .. } => {
                    out.extend(std::iter::repeat(ScaleParams { mean: 0.0, std: 1.0 }).take(f.width()))
                }
            }
        }
        out
    }

    /// Checks that `table` has the fitted column names and kinds.
    pub fn check_schema(&self, table: &DataTable) -> Result<()> {
        if table.n_cols() != self.schema.len() {
            return Err(Error::SchemaMismatch(format!(
                "{} columns, expected {}",
                table.n_cols(),
                self.schema.len()
            )));
        }
        for (col, spec) in table.columns().iter().zip(&self.schema) {
            if col.spec.name != spec.name || col.spec.kind != spec.kind || col.spec.role != spec.role
            {
                return Err(Error::SchemaMismatch(format!(
                    "column `{}` ({:?}, {:?}) where `{}` ({:?}, {:?}) was fitted",
                    col.spec.name, col.spec.kind, col.spec.role, spec.name, spec.kind, spec.role
                )));
            }
        }
        Ok(())
    }

    /// Applies the fitted encoding to a table with the same schema.
    pub fn encode(&self, table: &DataTable) -> Result<DesignMatrix> {
        self.check_schema(table)?;
        let n = table.n_rows();
        let d = self.width();
        let mut values = Matrix::zeros(n, d);
        let mut offset = 0;
        for f in &self.features {
            let col = table.column(f.column())?;
            match (f, &col.data) {
                (FeatureEncoding::Numeric { scale, .. }, ColumnData::Numeric(v)) => {
                    for (r, cell) in v.iter().enumerate() {
                        let x = cell.unwrap_or(scale.mean);
                        values.set(r, offset, (x - scale.mean) / scale.std);
                    }
                }
                (
                    FeatureEncoding::OneHot {
                        categories,
                        missing_slot,
                        column,
                    },
                    ColumnData::Categorical(codes),
                ) => {
                    // map the table's codes onto the fitted vocabulary
                    let remap: Vec<Option<usize>> = col
                        .spec
                        .categories
                        .iter()
                        .map(|label| categories.iter().position(|c| c == label))
                        .collect();
                    for (r, cell) in codes.iter().enumerate() {
                        let slot = match cell {
                            Some(code) => remap[*code as usize].ok_or_else(|| {
                                Error::UnseenCategory {
                                    column: column.clone(),
                                    value: col.spec.categories[*code as usize].clone(),
                                }
                            })?,
                            None if *missing_slot => categories.len(),
                            // no missing cells when fitted: leave the group all zero
                            None => continue,
                        };
                        values.set(r, offset + slot, 1.0);
                    }
                }
                _ => {
                    return Err(Error::SchemaMismatch(format!(
                        "column `{}` changed storage kind",
                        f.column()
                    )))
                }
            }
            offset += f.width();
        }
        let carried = table
            .columns()
            .iter()
            .filter(|c| c.spec.role != Role::Feature)
            .cloned()
            .collect();
        Ok(DesignMatrix {
            values,
            column_map: self.column_map(),
            scaler: self.scaler(),
            encoder: self.clone(),
            carried,
        })
    }
}

/// Mean and population standard deviation of the present cells; `None`
/// if every cell is missing.
fn fit_scale(values: &[Option<f64>]) -> Option<ScaleParams> {
    let present: Vec<f64> = values.iter().flatten().copied().collect();
    if present.is_empty() {
        return None;
    }
    let n = present.len() as f64;
    let mean = present.iter().sum::<f64>() / n;
    let var = present.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let std = var.sqrt();
    // relative test so that a column of identical large values counts as constant
    let std = if std <= 1e-12 * mean.abs().max(1.0) { 1.0 } else { std };
    Some(ScaleParams { mean, std })
}

/// Encoded feature block plus everything needed to map it back.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    pub values: Matrix,
    pub column_map: Vec<DesignColumn>,
    pub scaler: Vec<ScaleParams>,
    encoder: Encoder,
    /// Non-feature columns (protected, target) carried through unchanged.
    pub carried: Vec<Column>,
}

impl DesignMatrix {
    pub fn encoder(&self) -> &Encoder {
        &self.encoder
    }

    pub fn n_rows(&self) -> usize {
        self.values.rows()
    }

    pub fn carried(&self, name: &str) -> Result<&Column> {
        self.carried
            .iter()
            .find(|c| c.spec.name == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    /// Same column map and carried columns with a new value block, e.g. the
    /// output of a reconstruction network.
    pub fn with_values(&self, values: Matrix) -> Result<DesignMatrix> {
        if values.shape() != self.values.shape() {
            return Err(Error::Dimension(format!(
                "{:?} values for a {:?} design matrix",
                values.shape(),
                self.values.shape()
            )));
        }
        Ok(DesignMatrix {
            values,
            column_map: self.column_map.clone(),
            scaler: self.scaler.clone(),
            encoder: self.encoder.clone(),
            carried: self.carried.clone(),
        })
    }

    /// Maps the design block back to a table with the source schema:
    /// numeric columns are de-standardized, each one-hot group becomes its
    /// argmax category (lowest index wins ties).
    pub fn decode(&self) -> Result<DataTable> {
        decode(&self.values, &self.encoder, &self.carried)
    }
}

pub fn encode(table: &DataTable, fitted: Option<&Encoder>) -> Result<DesignMatrix> {
    match fitted {
        Some(enc) => enc.encode(table),
        None => Encoder::fit(table)?.encode(table),
    }
}

pub fn decode(values: &Matrix, encoder: &Encoder, carried: &[Column]) -> Result<DataTable> {
    if values.cols() != encoder.width() {
        return Err(Error::Dimension(format!(
            "{} design columns, column map has {}",
            values.cols(),
            encoder.width()
        )));
    }
    let n = values.rows();
    let mut decoded: Vec<Column> = Vec::with_capacity(encoder.features.len());
    let mut offset = 0;
    for f in &encoder.features {
        let spec = encoder
            .schema
            .iter()
            .find(|s| s.name == f.column())
            .expect("fitted column is in the schema")
            .clone();
        match f {
            FeatureEncoding::Numeric { scale, .. } => {
                let v = (0..n)
                    .map(|r| Some(values.get(r, offset) * scale.std + scale.mean))
                    .collect();
                decoded.push(Column::numeric(spec, v));
            }
            FeatureEncoding::OneHot { categories, .. } => {
                let w = f.width();
                let codes = (0..n)
                    .map(|r| {
                        let row = &values.row(r)[offset..offset + w];
                        let best = argmax(row);
                        (best < categories.len()).then_some(best as u32)
                    })
                    .collect();
                let mut spec = spec;
                spec.categories = categories.clone();
                decoded.push(Column::categorical(spec, codes));
            }
        }
        offset += f.width();
    }

    let mut columns = Vec::with_capacity(encoder.schema.len());
    for spec in &encoder.schema {
        let col = if spec.role == Role::Feature {
            decoded.iter().find(|c| c.spec.name == spec.name).cloned()
        } else {
            carried.iter().find(|c| c.spec.name == spec.name).cloned()
        };
        let col = col.ok_or_else(|| Error::UnknownColumn(spec.name.clone()))?;
        if col.data.len() != n {
            return Err(Error::Dimension(format!(
                "carried column `{}` has {} rows, expected {n}",
                spec.name,
                col.data.len()
            )));
        }
        columns.push(col);
    }
    Ok(DataTable::from_parts_unchecked(columns, n))
}

/// Index of the largest value; the lowest index wins ties.
pub fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tabular::csv_io::parse_csv;

    fn toy() -> DataTable {
        let schema = vec![
            ColumnSpec::numeric("x", Role::Feature),
            ColumnSpec::categorical("c", Role::Feature, ["p", "q", "r"]),
            ColumnSpec::categorical("g", Role::Protected, ["a", "b"]),
            ColumnSpec::binary("t", Role::Target),
        ];
        parse_csv(b"x,c,g,t\n2,p,a,0\n4,q,b,1\n6,r,a,1\n", &schema).unwrap()
    }

    #[test]
    fn dimensions_and_standardization() {
        let m = encode(&toy(), None).unwrap();
        assert_eq!(m.values.cols(), 1 + 3);
        let s = 1.224744871391589;
        let col: Vec<f64> = m.values.column(0);
        for (a, b) in col.iter().zip([-s, 0.0, s]) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
        assert_eq!(m.carried.len(), 2);
        assert!(m.carried("g").is_ok());
    }

    #[test]
    fn one_hot_rows_sum_to_one() {
        let m = encode(&toy(), None).unwrap();
        for r in 0..3 {
            let s: f64 = m.values.row(r)[1..4].iter().sum();
            assert_eq!(s, 1.0);
        }
    }

    #[test]
    fn round_trip() {
        let t = toy();
        let back = encode(&t, None).unwrap().decode().unwrap();
        assert_eq!(back.schema(), t.schema());
        assert_eq!(back.column("c").unwrap(), t.column("c").unwrap());
        let a = back.column("x").unwrap().as_numeric().unwrap().to_vec();
        for (x, y) in a.iter().zip([2.0, 4.0, 6.0]) {
            assert!((x.unwrap() - y).abs() < 1e-9);
        }
    }

    #[test]
    fn argmax_and_ties() {
        assert_eq!(argmax(&[0.2, 0.7, 0.1]), 1);
        assert_eq!(argmax(&[0.5, 0.5]), 0);
    }

    #[test]
    fn decode_dimension_mismatch() {
        let m = encode(&toy(), None).unwrap();
        let bad = Matrix::zeros(3, 2);
        assert!(matches!(
            decode(&bad, m.encoder(), &m.carried),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn unseen_category_at_transform() {
        let enc = Encoder::fit(&toy()).unwrap();
        let schema = vec![
            ColumnSpec::numeric("x", Role::Feature),
            ColumnSpec::categorical("c", Role::Feature, ["p", "z"]),
            ColumnSpec::categorical("g", Role::Protected, ["a", "b"]),
            ColumnSpec::binary("t", Role::Target),
        ];
        let other = parse_csv(b"x,c,g,t\n1,z,a,0\n", &schema).unwrap();
        assert!(matches!(
            enc.encode(&other),
            Err(Error::UnseenCategory { value, .. }) if value == "z"
        ));
    }

    #[test]
    fn missing_cells_imputed_and_slotted() {
        let schema = vec![
            ColumnSpec::numeric("x", Role::Feature),
            ColumnSpec::categorical("c", Role::Feature, ["p", "q"]),
        ];
        let t = parse_csv(b"x,c\n1,p\nNA,\n3,q\n", &schema).unwrap();
        let m = encode(&t, None).unwrap();
        assert_eq!(m.values.cols(), 1 + 3);
        assert_eq!(m.values.get(1, 0), 0.0);
        assert_eq!(m.values.row(1)[1..], [0.0, 0.0, 1.0]);
        let back = m.decode().unwrap();
        assert_eq!(back.column("c").unwrap().label(1), None);
        assert_eq!(back.column("x").unwrap().as_numeric().unwrap()[1], Some(2.0));

        // fitted without missing cells: the group stays all zero
        let full = parse_csv(b"x,c\n1,p\n3,q\n", &schema).unwrap();
        let enc = Encoder::fit(&full).unwrap();
        let m = enc.encode(&t).unwrap();
        assert_eq!(m.values.row(1)[1..], [0.0, 0.0]);
    }

    #[test]
    fn drop_role_rejected() {
        let schema = vec![ColumnSpec::numeric("x", Role::Drop)];
        let t = parse_csv(b"x\n1\n", &schema).unwrap();
        assert!(matches!(encode(&t, None), Err(Error::DropColumnPresent(_))));
    }

    #[test]
    fn constant_column_gets_unit_std() {
        let schema = vec![ColumnSpec::numeric("x", Role::Feature)];
        let t = parse_csv(b"x\n5\n5\n5\n", &schema).unwrap();
        let m = encode(&t, None).unwrap();
        assert_eq!(m.scaler[0].std, 1.0);
        assert_eq!(m.values.column(0), vec![0.0; 3]);
    }
}
