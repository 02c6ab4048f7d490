use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Numeric,
    Categorical,
    Binary,
}

impl ColumnKind {
    pub fn is_categorical(self) -> bool {
        matches!(self, ColumnKind::Categorical | ColumnKind::Binary)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    #[default]
    Feature,
    Protected,
    Target,
    Drop,
}

pub const BINARY_CATEGORIES: [&str; 2] = ["0", "1"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub name: String,
    pub kind: ColumnKind,
    #[serde(default)]
    pub role: Role,
    /// Ordered category labels. Empty for numeric columns. For categorical
    /// columns in a schema file it may be omitted, in which case the loader
    /// infers the sorted set of distinct labels.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub categories: Vec<String>,
}

impl ColumnSpec {
    pub fn numeric(name: impl Into<String>, role: Role) -> Self {
        Self {
            name: name.into(),
            kind: ColumnKind::Numeric,
            role,
            categories: Vec::new(),
        }
    }

    pub fn categorical<S: Into<String>>(
        name: impl Into<String>,
        role: Role,
        categories: impl IntoIterator<Item = S>,
    ) -> Self {
        Self {
            name: name.into(),
            kind: ColumnKind::Categorical,
            role,
            categories: categories.into_iter().map(Into::into).collect(),
        }
    }

    pub fn binary(name: impl Into<String>, role: Role) -> Self {
        Self {
            name: name.into(),
            kind: ColumnKind::Binary,
            role,
            categories: BINARY_CATEGORIES.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn category_index(&self, label: &str) -> Option<usize> {
        self.categories.iter().position(|c| c == label)
    }
}

/// Checks the declarative invariants of a schema as written in a schema
/// file: unique names, categorical columns with either no categories
/// (inferred later) or at least two, binary columns exactly `{0, 1}`.
pub fn validate_schema(specs: &[ColumnSpec]) -> Result<()> {
    let mut seen = HashSet::new();
    for spec in specs {
        if spec.name.is_empty() {
            return Err(Error::Schema("empty column name".into()));
        }
        if !seen.insert(spec.name.as_str()) {
            return Err(Error::DuplicateColumn(spec.name.clone()));
        }
        match spec.kind {
            ColumnKind::Numeric if !spec.categories.is_empty() => {
                return Err(Error::Schema(format!(
                    "numeric column `{}` declares categories",
                    spec.name
                )))
            }
            ColumnKind::Categorical if spec.categories.len() == 1 => {
                return Err(Error::Schema(format!(
                    "categorical column `{}` needs at least 2 categories",
                    spec.name
                )))
            }
            ColumnKind::Categorical => {
                let uniq: HashSet<_> = spec.categories.iter().collect();
                if uniq.len() != spec.categories.len() {
                    return Err(Error::Schema(format!(
                        "categorical column `{}` repeats a category",
                        spec.name
                    )));
                }
            }
            ColumnKind::Binary
                if !spec.categories.is_empty() && spec.categories != BINARY_CATEGORIES =>
            {
                return Err(Error::Schema(format!(
                    "binary column `{}` must have categories [\"0\", \"1\"]",
                    spec.name
                )))
            }
            _ => {}
        }
    }
    Ok(())
}

/// Normalizes a validated spec list: binary columns get their implicit
/// `{0, 1}` categories.
pub(crate) fn normalize(mut specs: Vec<ColumnSpec>) -> Vec<ColumnSpec> {
    for s in &mut specs {
        if s.kind == ColumnKind::Binary {
            s.categories = BINARY_CATEGORIES.iter().map(|c| c.to_string()).collect();
        }
    }
    specs
}

pub fn parse_schema(json: &str) -> Result<Vec<ColumnSpec>> {
    let specs: Vec<ColumnSpec> = serde_json::from_str(json)?;
    validate_schema(&specs)?;
    Ok(normalize(specs))
}

pub fn load_schema(path: impl AsRef<Path>) -> Result<Vec<ColumnSpec>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_schema(&text)
}
