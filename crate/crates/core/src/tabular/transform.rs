//! Dataset-preparation transforms. Each takes a table by reference and
//! returns a new one.

use serde::{Deserialize, Serialize};

use super::schema::{ColumnKind, ColumnSpec, Role};
use super::table::{format_number, Column, ColumnData, DataTable};
use crate::error::{Error, Result};

/// Keeps rows whose `column` cell is one of `keep`. The column's category
/// list shrinks to the kept labels (original order). Binary columns keep
/// their `{0, 1}` vocabulary.
pub fn filter_rows(table: &DataTable, column: &str, keep: &[String]) -> Result<DataTable> {
    let ci = table.index_of(column)?;
    let col = &table.columns()[ci];
    let codes = col.as_codes().ok_or(Error::WrongKind {
        column: column.to_string(),
        expected: "categorical",
    })?;
    for k in keep {
        if col.spec.category_index(k).is_none() {
            return Err(Error::InvalidArgument(format!(
                "`{k}` is not a category of `{column}`"
            )));
        }
    }
    let kept_codes: Vec<u32> = col
        .spec
        .categories
        .iter()
        .enumerate()
        .filter(|(_, c)| keep.contains(c))
        .map(|(i, _)| i as u32)
        .collect();
    let rows: Vec<usize> = codes
        .iter()
        .enumerate()
        .filter(|(_, c)| matches!(c, Some(code) if kept_codes.contains(code)))
        .map(|(i, _)| i)
        .collect();
    if rows.is_empty() {
        return Err(Error::EmptyResult(column.to_string()));
    }
    let filtered = table.select_rows(&rows);
    if col.spec.kind == ColumnKind::Binary {
        return Ok(filtered);
    }

    let mut spec = col.spec.clone();
    spec.categories = kept_codes
        .iter()
        .map(|&c| col.spec.categories[c as usize].clone())
        .collect();
    let remap = |c: u32| kept_codes.iter().position(|&k| k == c).map(|p| p as u32);
    let new_codes = filtered.columns()[ci]
        .as_codes()
        .expect("categorical")
        .iter()
        .map(|c| c.and_then(remap))
        .collect();
    filtered.replace_column(ci, Column::categorical(spec, new_codes))
}

/// Nearest-rank 75th percentile: the `ceil(0.75 n)`-th smallest value.
pub fn nearest_rank_q3(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = (0.75 * sorted.len() as f64).ceil() as usize;
    sorted[rank.max(1) - 1]
}

/// Replaces a numeric column with a binary flag: 1 iff the value strictly
/// exceeds the nearest-rank 75th percentile of the column.
pub fn quartile_binarize(table: &DataTable, column: &str) -> Result<DataTable> {
    let ci = table.index_of(column)?;
    let col = &table.columns()[ci];
    let values = numeric_cells(col)?;
    if values.iter().all(Option::is_none) {
        return Err(Error::AllMissing(column.to_string()));
    }
    if values.iter().any(Option::is_none) {
        return Err(Error::MissingCells(column.to_string()));
    }
    let present: Vec<f64> = values.iter().flatten().copied().collect();
    let q3 = nearest_rank_q3(&present);
    let codes = present.iter().map(|&x| Some(u32::from(x > q3))).collect();
    table.replace_column(ci, Column::categorical(ColumnSpec::binary(column, col.spec.role), codes))
}

/// Labels for half-open buckets: `under e1`, `e1 to e2`, ..., `over ek`.
/// A value equal to an edge goes to the bucket above it.
pub fn bucket_labels(edges: &[f64]) -> Vec<String> {
    let mut labels = Vec::with_capacity(edges.len() + 1);
    labels.push(format!("under {}", format_number(edges[0])));
    for w in edges.windows(2) {
        labels.push(format!("{} to {}", format_number(w[0]), format_number(w[1])));
    }
    labels.push(format!("over {}", format_number(edges[edges.len() - 1])));
    labels
}

pub fn bucket_numeric(table: &DataTable, column: &str, edges: &[f64]) -> Result<DataTable> {
    if edges.is_empty()
        || edges.iter().any(|e| !e.is_finite())
        || edges.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(Error::UnsortedEdges);
    }
    let ci = table.index_of(column)?;
    let col = &table.columns()[ci];
    let values = numeric_cells(col)?;
    let codes = values
        .iter()
        .map(|v| v.map(|x| edges.iter().filter(|&&e| x >= e).count() as u32))
        .collect();
    let spec = ColumnSpec::categorical(column, col.spec.role, bucket_labels(edges));
    table.replace_column(ci, Column::categorical(spec, codes))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", content = "value", rename_all = "snake_case")]
pub enum Threshold {
    /// value ≥ t
    AtLeast(f64),
    /// value > t
    Above(f64),
}

impl Threshold {
    pub fn holds(self, x: f64) -> bool {
        match self {
            Threshold::AtLeast(t) => x >= t,
            Threshold::Above(t) => x > t,
        }
    }
}

pub fn binarize_threshold(table: &DataTable, column: &str, positive_if: Threshold) -> Result<DataTable> {
    let ci = table.index_of(column)?;
    let col = &table.columns()[ci];
    let values = numeric_cells(col)?;
    let codes = values
        .iter()
        .map(|v| v.map(|x| u32::from(positive_if.holds(x))))
        .collect();
    table.replace_column(ci, Column::categorical(ColumnSpec::binary(column, col.spec.role), codes))
}

/// Removes the `k` columns with the most missing cells; ties go to the
/// column that comes first in the schema.
pub fn drop_sparse_columns(table: &DataTable, k: usize) -> Result<DataTable> {
    if k >= table.n_cols() {
        return Err(Error::TooManyDropped {
            k,
            columns: table.n_cols(),
        });
    }
    let mut order: Vec<(usize, usize)> = table
        .columns()
        .iter()
        .enumerate()
        .map(|(i, c)| (i, c.data.missing_count()))
        .collect();
    order.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let dropped: Vec<usize> = order.iter().take(k).map(|&(i, _)| i).collect();
    let columns = table
        .columns()
        .iter()
        .enumerate()
        .filter(|(i, _)| !dropped.contains(i))
        .map(|(_, c)| c.clone())
        .collect();
    DataTable::new(columns)
}

pub fn drop_columns(table: &DataTable, names: &[String]) -> Result<DataTable> {
    for n in names {
        table.index_of(n)?;
    }
    let columns = table
        .columns()
        .iter()
        .filter(|c| !names.contains(&c.spec.name))
        .cloned()
        .collect();
    DataTable::new(columns)
}

/// Removes every column whose role is `drop`.
pub fn remove_dropped(table: &DataTable) -> Result<DataTable> {
    let columns = table
        .columns()
        .iter()
        .filter(|c| c.spec.role != Role::Drop)
        .cloned()
        .collect();
    DataTable::new(columns)
}

pub fn set_role(table: &DataTable, column: &str, role: Role) -> Result<DataTable> {
    let ci = table.index_of(column)?;
    let mut col = table.columns()[ci].clone();
    col.spec.role = role;
    table.replace_column(ci, col)
}

/// Keeps the rows where `column` is not missing.
pub fn drop_missing_rows(table: &DataTable, column: &str) -> Result<DataTable> {
    let col = table.column(column)?;
    let rows: Vec<usize> = (0..table.n_rows())
        .filter(|&r| col.label(r).is_some())
        .collect();
    if rows.is_empty() {
        return Err(Error::EmptyResult(column.to_string()));
    }
    Ok(table.select_rows(&rows))
}

fn numeric_cells(col: &Column) -> Result<&[Option<f64>]> {
    match &col.data {
        ColumnData::Numeric(v) => Ok(v),
        _ => Err(Error::WrongKind {
            column: col.spec.name.clone(),
            expected: "numeric",
        }),
    }
}

/// One declarative preparation step, as written in study configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Step {
    FilterRows { column: String, keep: Vec<String> },
    QuartileBinarize { column: String },
    BucketNumeric { column: String, edges: Vec<f64> },
    BinarizeThreshold { column: String, positive_if: Threshold },
    DropSparseColumns { k: usize },
    DropColumns { columns: Vec<String> },
    DropMissingRows { column: String },
    SetRole { column: String, role: Role },
    RemoveDropped,
}

impl Step {
    pub fn apply(&self, table: &DataTable) -> Result<DataTable> {
        match self {
            Step::FilterRows { column, keep } => filter_rows(table, column, keep),
            Step::QuartileBinarize { column } => quartile_binarize(table, column),
            Step::BucketNumeric { column, edges } => bucket_numeric(table, column, edges),
            Step::BinarizeThreshold {
                column,
                positive_if,
            } => binarize_threshold(table, column, *positive_if),
            Step::DropSparseColumns { k } => drop_sparse_columns(table, *k),
            Step::DropColumns { columns } => drop_columns(table, columns),
            Step::DropMissingRows { column } => drop_missing_rows(table, column),
            Step::SetRole { column, role } => set_role(table, column, *role),
            Step::RemoveDropped => remove_dropped(table),
        }
    }
}

pub fn apply_steps(table: &DataTable, steps: &[Step]) -> Result<DataTable> {
    let mut t = table.clone();
    for s in steps {
        t = s.apply(&t)?;
    }
    Ok(t)
}
