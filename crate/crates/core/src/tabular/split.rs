use serde::{Deserialize, Serialize};

use super::table::{ColumnData, DataTable};
use crate::error::{Error, Result};
use crate::rng::{streams, Rng};

pub const DEFAULT_TEST_FRACTION: f64 = 0.3;

/// Row indices of a train/test partition, each sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Deterministic split of `n` rows. With `strata`, every stratum contributes
/// test rows in proportion to its size (largest-remainder rounding, so the
/// total test size is `round(fraction * n)`); without, rows are shuffled as
/// one pool.
pub fn split_indices(
    n: usize,
    strata: Option<&[u32]>,
    test_fraction: f64,
    seed: u64,
) -> Result<Split> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "test fraction {test_fraction} not in (0, 1)"
        )));
    }
    if n < 10 {
        return Err(Error::InvalidArgument(format!("split needs n >= 10, got {n}")));
    }
    let mut rng = Rng::stream(seed, streams::SPLIT);
    let groups: Vec<Vec<usize>> = match strata {
        None => vec![(0..n).collect()],
        Some(labels) => {
            let k = labels.iter().copied().max().map_or(0, |m| m as usize + 1);
            let mut g = vec![Vec::new(); k];
            for (i, &l) in labels.iter().enumerate() {
                g[l as usize].push(i);
            }
            g.retain(|v| !v.is_empty());
            g
        }
    };

    let total_test = (test_fraction * n as f64).round() as usize;
    let exact: Vec<f64> = groups
        .iter()
        .map(|g| test_fraction * g.len() as f64)
        .collect();
    let mut quota: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let mut remaining = total_test.saturating_sub(quota.iter().sum());
    let mut order: Vec<usize> = (0..groups.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = exact[a] - exact[a].floor();
        let fb = exact[b] - exact[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &g in &order {
        if remaining == 0 {
            break;
        }
        if quota[g] < groups[g].len() {
            quota[g] += 1;
            remaining -= 1;
        }
    }

    let mut train = Vec::with_capacity(n - total_test);
    let mut test = Vec::with_capacity(total_test);
    for (g, q) in groups.into_iter().zip(quota) {
        let mut g = g;
        rng.shuffle(&mut g);
        test.extend_from_slice(&g[..q]);
        train.extend_from_slice(&g[q..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(Split { train, test })
}

/// Split indices for a table, stratified on the target column when it is
/// categorical (a numeric target is split without stratification).
pub fn split_table_indices(table: &DataTable, test_fraction: f64, seed: u64) -> Result<Split> {
    let target = table.target()?;
    match &target.data {
        ColumnData::Categorical(codes) => {
            let labels = codes_or_missing(target.name(), codes)?;
            for (k, label) in target.spec.categories.iter().enumerate() {
                let count = labels.iter().filter(|&&l| l as usize == k).count();
                if count == 1 {
                    return Err(Error::TinyClass {
                        column: target.name().to_string(),
                        class: label.clone(),
                    });
                }
            }
            split_indices(table.n_rows(), Some(&labels), test_fraction, seed)
        }
        ColumnData::Numeric(_) => split_indices(table.n_rows(), None, test_fraction, seed),
    }
}

pub fn train_test_split(
    table: &DataTable,
    test_fraction: f64,
    seed: u64,
) -> Result<(DataTable, DataTable)> {
    let s = split_table_indices(table, test_fraction, seed)?;
    Ok((table.select_rows(&s.train), table.select_rows(&s.test)))
}

pub(crate) fn codes_or_missing(column: &str, codes: &[Option<u32>]) -> Result<Vec<u32>> {
    codes
        .iter()
        .map(|c| c.ok_or_else(|| Error::MissingCells(column.to_string())))
        .collect()
}
