//! CSV ingestion and output.
//!
//! Comma separated, first row is the header, RFC 4180 double-quote escaping,
//! UTF-8. An empty field or the literal `NA` is a missing cell; any other cell
//! that does not parse for its column kind also becomes missing.

use std::collections::{BTreeSet, HashMap};
use std::io::{Read, Write};
use std::path::Path;

use super::schema::{normalize, validate_schema, ColumnKind, ColumnSpec};
use super::table::{Column, ColumnData, DataTable};
use crate::error::{Error, Result};

pub fn load_csv(path: impl AsRef<Path>, schema: &[ColumnSpec]) -> Result<DataTable> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(std::io::BufReader::new(file), schema)
}

pub fn read_csv<R: Read>(reader: R, schema: &[ColumnSpec]) -> Result<DataTable> {
    validate_schema(schema)?;
    let schema = normalize(schema.to_vec());
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);

    let header: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let ordered = match_header(&header, &schema)?;

    let mut raw: Vec<Vec<Option<String>>> = vec![Vec::new(); header.len()];
    for record in rdr.records() {
        let record = record?;
        for (j, field) in record.iter().enumerate() {
            raw[j].push(parse_missing(field));
        }
    }

    let columns = ordered
        .into_iter()
        .zip(raw)
        .map(|(spec, cells)| build_column(spec, cells))
        .collect::<Result<Vec<_>>>()?;
    DataTable::new(columns)
}

pub fn parse_csv(text: &[u8], schema: &[ColumnSpec]) -> Result<DataTable> {
    read_csv(text, schema)
}

/// Returns the schema reordered to match the file's header.
fn match_header(header: &[String], schema: &[ColumnSpec]) -> Result<Vec<ColumnSpec>> {
    let mut seen = BTreeSet::new();
    for h in header {
        if !seen.insert(h.as_str()) {
            return Err(Error::DuplicateColumn(h.clone()));
        }
    }
    let by_name: HashMap<&str, &ColumnSpec> =
        schema.iter().map(|s| (s.name.as_str(), s)).collect();
    let missing: Vec<&str> = schema
        .iter()
        .map(|s| s.name.as_str())
        .filter(|n| !seen.contains(n))
        .collect();
    let extra: Vec<&str> = header
        .iter()
        .map(String::as_str)
        .filter(|h| !by_name.contains_key(h))
        .collect();
    if !missing.is_empty() || !extra.is_empty() {
        return Err(Error::HeaderMismatch(format!(
            "missing from header: {missing:?}; not in schema: {extra:?}"
        )));
    }
    Ok(header.iter().map(|h| by_name[h.as_str()].clone()).collect())
}

fn parse_missing(field: &str) -> Option<String> {
    let t = field.trim();
    if t.is_empty() || t == "NA" {
        None
    } else {
        Some(t.to_string())
    }
}

fn build_column(mut spec: ColumnSpec, cells: Vec<Option<String>>) -> Result<Column> {
    match spec.kind {
        ColumnKind::Numeric => {
            let values = cells
                .iter()
                .map(|c| {
                    c.as_deref()
                        .and_then(|s| s.parse::<f64>().ok())
                        .filter(|x| x.is_finite())
                })
                .collect();
            Ok(Column::numeric(spec, values))
        }
        ColumnKind::Binary => {
            let codes = cells
                .iter()
                .map(|c| {
                    c.as_deref().and_then(|s| match s.parse::<f64>() {
                        Ok(x) if x == 0.0 => Some(0),
                        Ok(x) if x == 1.0 => Some(1),
                        _ => None,
                    })
                })
                .collect();
            Ok(Column::categorical(spec, codes))
        }
        ColumnKind::Categorical => {
            if spec.categories.is_empty() {
                let distinct: BTreeSet<&str> = cells.iter().flatten().map(String::as_str).collect();
                spec.categories = distinct.into_iter().map(str::to_string).collect();
                if spec.categories.len() < 2 {
                    return Err(Error::Schema(format!(
                        "categorical column `{}` has fewer than 2 distinct labels to infer categories from",
                        spec.name
                    )));
                }
            }
            let lookup: HashMap<&str, u32> = spec
                .categories
                .iter()
                .enumerate()
                .map(|(i, c)| (c.as_str(), i as u32))
                .collect();
            let codes = cells
                .iter()
                .map(|c| c.as_deref().and_then(|s| lookup.get(s).copied()))
                .collect();
            Ok(Column {
                data: ColumnData::Categorical(codes),
                spec,
            })
        }
    }
}

pub fn write_csv<W: Write>(table: &DataTable, writer: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    w.write_record(table.names())?;
    for r in 0..table.n_rows() {
        w.write_record(
            table
                .row_labels(r)
                .into_iter()
                .map(|c| c.unwrap_or_default()),
        )?;
    }
    w.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}

pub fn to_csv_string(table: &DataTable) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(table, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv writer emits utf-8"))
}
