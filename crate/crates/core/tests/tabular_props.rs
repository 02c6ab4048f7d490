use std::collections::BTreeSet;

use fairprep::tabular::{
    encode, nearest_rank_q3, parse_csv, quartile_binarize, to_csv_string, Column, ColumnSpec,
    DataTable, Role,
};
use proptest::prelude::*;

fn numeric_cells(n: usize) -> impl Strategy<Value = Vec<Option<f64>>> {
    prop::collection::vec(prop::option::weighted(0.85, -1e3f64..1e3), n)
}

fn category_set() -> impl Strategy<Value = Vec<String>> {
    prop::collection::btree_set("[a-z][a-z ,\"]{0,5}[a-z]", 2..5)
        .prop_map(|s| s.into_iter().filter(|c| c != "NA").collect::<Vec<_>>())
        .prop_filter("two or more", |v: &Vec<String>| v.len() >= 2)
}

fn code_cells(n: usize, k: usize) -> impl Strategy<Value = Vec<Option<u32>>> {
    prop::collection::vec(prop::option::weighted(0.9, 0..k as u32), n)
}

/// A mixed table with at least one present cell per numeric column.
fn table() -> impl Strategy<Value = DataTable> {
    (2usize..40, 1usize..4, prop::collection::vec(category_set(), 1..3)).prop_flat_map(
        |(n, k, cats)| {
            let nums = prop::collection::vec(numeric_cells(n), k);
            let codes: Vec<_> = cats.iter().map(|c| code_cells(n, c.len())).collect();
            let target = prop::collection::vec(prop::option::of(0u32..2), n);
            (nums, codes, Just(cats), target).prop_map(|(nums, codes, cats, target)| {
                let mut cols = Vec::new();
                for (j, mut v) in nums.into_iter().enumerate() {
                    if v.iter().all(Option::is_none) {
                        v[0] = Some(1.5);
                    }
                    cols.push(Column::numeric(ColumnSpec::numeric(format!("x{j}"), Role::Feature), v));
                }
                for (j, (c, cat)) in codes.into_iter().zip(cats).enumerate() {
                    let spec = ColumnSpec::categorical(format!("c{j}"), Role::Feature, cat);
                    cols.push(Column::categorical(spec, c));
                }
                cols.push(Column::categorical(ColumnSpec::binary("y", Role::Target), target));
                DataTable::new(cols).unwrap()
            })
        },
    )
}

proptest! {
    #[test]
    fn encode_decode_round_trip(t in table()) {
        let dm = encode(&t, None).unwrap();
        let back = dm.decode().unwrap();
        prop_assert_eq!(back.names(), t.names());
        for (a, b) in t.columns().iter().zip(back.columns()) {
            match (a.as_numeric(), b.as_numeric()) {
                (Some(x), Some(y)) => {
                    let present: Vec<f64> = x.iter().flatten().copied().collect();
                    let mean = present.iter().sum::<f64>() / present.len() as f64;
                    for (u, v) in x.iter().zip(y) {
                        // missing cells come back imputed
                        let want = u.unwrap_or(mean);
                        prop_assert!((want - v.unwrap()).abs() <= 1e-9, "{want} vs {v:?}");
                    }
                }
                _ => prop_assert_eq!(a.as_codes(), b.as_codes()),
            }
        }
    }

    #[test]
    fn one_hot_groups_sum_to_one(t in table()) {
        let dm = encode(&t, None).unwrap();
        for b in dm.encoder().blocks().iter().filter(|b| b.one_hot) {
            for r in 0..dm.n_rows() {
                let row = &dm.values.row(r)[b.start..b.start + b.width];
                prop_assert_eq!(row.iter().sum::<f64>(), 1.0);
                prop_assert!(row.iter().all(|&v| v == 0.0 || v == 1.0));
            }
        }
    }

    #[test]
    fn standardized_columns_have_unit_spread(t in table()) {
        let dm = encode(&t, None).unwrap();
        for b in dm.encoder().blocks().iter().filter(|b| !b.one_hot) {
            let col = dm.values.column(b.start);
            let n = col.len() as f64;
            let mean = col.iter().sum::<f64>() / n;
            prop_assert!(mean.abs() < 1e-9);
            let var = col.iter().map(|v| v * v).sum::<f64>() / n;
            // imputed cells shrink the spread; constant columns encode to 0
            prop_assert!(var <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn csv_round_trip(t in table()) {
        let text = to_csv_string(&t).unwrap();
        let back = parse_csv(text.as_bytes(), &t.schema()).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn q3_matches_counting_definition(v in prop::collection::vec(-1e6f64..1e6, 1..200)) {
        let q = nearest_rank_q3(&v);
        let n = v.len();
        prop_assert!(v.contains(&q));
        // smallest sample value with at least 75% of the sample at or below it
        let cover = |x: f64| v.iter().filter(|&&y| y <= x).count() * 4 >= 3 * n;
        prop_assert!(cover(q));
        prop_assert!(!v.iter().any(|&x| x < q && cover(x)));
    }

    #[test]
    fn quartile_flag_marks_values_above_q3(v in prop::collection::vec(-50i32..50, 1..100)) {
        let cells: Vec<Option<f64>> = v.iter().map(|&x| Some(f64::from(x))).collect();
        let t = DataTable::new(vec![Column::numeric(ColumnSpec::numeric("a", Role::Protected), cells)]).unwrap();
        let out = quartile_binarize(&t, "a").unwrap();
        let flags = out.column("a").unwrap().as_codes().unwrap().to_vec();
        let q = nearest_rank_q3(&v.iter().map(|&x| f64::from(x)).collect::<Vec<_>>());
        let mut ones = 0;
        for (x, f) in v.iter().zip(&flags) {
            prop_assert_eq!(f.unwrap() == 1, f64::from(*x) > q);
            ones += usize::from(f.unwrap() == 1);
        }
        prop_assert!(ones * 4 <= v.len());
    }
}

#[test]
fn distinct_labels_survive_quoting() {
    let cats: BTreeSet<&str> = ["a,b", "say \"hi\"", "plain"].into();
    let spec = ColumnSpec::categorical("c", Role::Feature, cats.iter().copied());
    let t = DataTable::new(vec![Column::categorical(spec, vec![Some(0), None, Some(1), Some(2)])]).unwrap();
    let text = to_csv_string(&t).unwrap();
    assert_eq!(parse_csv(text.as_bytes(), &t.schema()).unwrap(), t);
}
