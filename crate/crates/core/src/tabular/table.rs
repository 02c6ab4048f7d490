use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::schema::{ColumnKind, ColumnSpec, Role};
use crate::error::{Error, Result};

/// Cell storage for one column. Categorical and binary cells hold an index
/// into the column's category list; `None` is the missing marker.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ColumnData {
    Numeric(Vec<Option<f64>>),
    Categorical(Vec<Option<u32>>),
}

impl ColumnData {
    pub fn len(&self) -> usize {
        match self {
            ColumnData::Numeric(v) => v.len(),
            ColumnData::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn missing_count(&self) -> usize {
        match self {
            ColumnData::Numeric(v) => v.iter().filter(|c| c.is_none()).count(),
            ColumnData::Categorical(v) => v.iter().filter(|c| c.is_none()).count(),
        }
    }

    pub fn select(&self, idx: &[usize]) -> ColumnData {
        match self {
            ColumnData::Numeric(v) => ColumnData::Numeric(idx.iter().map(|&i| v[i]).collect()),
            ColumnData::Categorical(v) => {
                ColumnData::Categorical(idx.iter().map(|&i| v[i]).collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub spec: ColumnSpec,
    pub data: ColumnData,
}

impl Column {
    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn numeric(spec: ColumnSpec, values: Vec<Option<f64>>) -> Self {
        Self {
            spec,
            data: ColumnData::Numeric(values),
        }
    }

    pub fn categorical(spec: ColumnSpec, codes: Vec<Option<u32>>) -> Self {
        Self {
            spec,
            data: ColumnData::Categorical(codes),
        }
    }

    pub fn as_numeric(&self) -> Option<&[Option<f64>]> {
        match &self.data {
            ColumnData::Numeric(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_codes(&self) -> Option<&[Option<u32>]> {
        match &self.data {
            ColumnData::Categorical(v) => Some(v),
            _ => None,
        }
    }

    /// Cell rendered as text, `None` when missing.
    pub fn label(&self, row: usize) -> Option<String> {
        match &self.data {
            ColumnData::Numeric(v) => v[row].map(format_number),
            ColumnData::Categorical(v) => v[row].map(|c| self.spec.categories[c as usize].clone()),
        }
    }

    /// Category labels per row; missing cells become `"NA"`.
    pub fn labels(&self) -> Vec<String> {
        (0..self.data.len())
            .map(|r| self.label(r).unwrap_or_else(|| "NA".to_string()))
            .collect()
    }

    /// Numeric view of the column: numeric cells as-is, binary cells as 0/1.
    pub fn values_f64(&self) -> Option<Vec<Option<f64>>> {
        match (&self.data, self.spec.kind) {
            (ColumnData::Numeric(v), _) => Some(v.clone()),
            (ColumnData::Categorical(v), ColumnKind::Binary) => {
                Some(v.iter().map(|c| c.map(f64::from)).collect())
            }
            _ => None,
        }
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        // avoid "-0"
        return "0".to_string();
    }
    format!("{x}")
}

/// A schema-tagged table stored column-wise. Every column has the same
/// number of rows. Tables are immutable values: transforms return new tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataTable {
    columns: Vec<Column>,
    n_rows: usize,
}

impl DataTable {
    pub fn new(columns: Vec<Column>) -> Result<Self> {
        let n_rows = columns.first().map_or(0, |c| c.data.len());
        let mut names = HashSet::new();
        for c in &columns {
            if !names.insert(c.spec.name.as_str()) {
                return Err(Error::DuplicateColumn(c.spec.name.clone()));
            }
            if c.data.len() != n_rows {
                return Err(Error::Dimension(format!(
                    "column `{}` has {} rows, expected {n_rows}",
                    c.spec.name,
                    c.data.len()
                )));
            }
            check_column(c)?;
        }
        Ok(Self { columns, n_rows })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn into_columns(self) -> Vec<Column> {
        self.columns
    }

    pub fn schema(&self) -> Vec<ColumnSpec> {
        self.columns.iter().map(|c| c.spec.clone()).collect()
    }

    pub fn names(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name()).collect()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c.spec.name == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    pub fn column(&self, name: &str) -> Result<&Column> {
        Ok(&self.columns[self.index_of(name)?])
    }

    pub fn columns_with_role(&self, role: Role) -> impl Iterator<Item = &Column> {
        self.columns.iter().filter(move |c| c.spec.role == role)
    }

    /// The unique target column, if the table has exactly one.
    pub fn target(&self) -> Result<&Column> {
        let mut it = self.columns_with_role(Role::Target);
        match (it.next(), it.next()) {
            (Some(c), None) => Ok(c),
            (None, _) => Err(Error::Schema("no column has role=target".into())),
            _ => Err(Error::Schema("more than one column has role=target".into())),
        }
    }

    pub fn select_rows(&self, idx: &[usize]) -> DataTable {
        let columns = self
            .columns
            .iter()
            .map(|c| Column {
                spec: c.spec.clone(),
                data: c.data.select(idx),
            })
            .collect();
        DataTable {
            columns,
            n_rows: idx.len(),
        }
    }

    pub(crate) fn replace_column(&self, idx: usize, column: Column) -> Result<DataTable> {
        let mut columns = self.columns.clone();
        columns[idx] = column;
        DataTable::new(columns)
    }

    pub(crate) fn from_parts_unchecked(columns: Vec<Column>, n_rows: usize) -> Self {
        Self { columns, n_rows }
    }

    /// Row-major text view (missing cells as `None`), mostly for tests and
    /// CSV output.
    pub fn row_labels(&self, row: usize) -> Vec<Option<String>> {
        self.columns.iter().map(|c| c.label(row)).collect()
    }
}

fn check_column(c: &Column) -> Result<()> {
    match (&c.data, c.spec.kind) {
        (ColumnData::Numeric(v), ColumnKind::Numeric) => {
            if v.iter().flatten().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite);
            }
        }
        (ColumnData::Categorical(v), ColumnKind::Categorical | ColumnKind::Binary) => {
            let k = c.spec.categories.len() as u32;
            if v.iter().flatten().any(|&code| code >= k) {
                return Err(Error::Schema(format!(
                    "column `{}` has a code outside its categories",
                    c.spec.name
                )));
            }
        }
        _ => {
            return Err(Error::Schema(format!(
                "column `{}` storage does not match its kind",
                c.spec.name
            )))
        }
    }
    Ok(())
}
