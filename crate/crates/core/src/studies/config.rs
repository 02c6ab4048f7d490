use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::pipeline::ModelKind;
use crate::audit::AuditOptions;
use crate::debias::DebiasConfig;
use crate::error::{Error, Result};
use crate::tabular::{
    apply_steps, load_csv, set_role, validate_schema, ColumnKind, ColumnSpec, DataTable, Role, Step,
    DEFAULT_TEST_FRACTION,
};

/// Environment variable naming an alternative data directory, searched
/// before the bundled copies.
pub const DATA_DIR_ENV: &str = "FAIRPREP_DATA_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSource {
    /// File name, resolved against the data directory.
    pub file: String,
    /// sha256 of the expected file.
    pub sha256: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub url: Option<String>,
    /// The bundled file is a generated stand-in, not the public dataset.
    #[serde(default)]
    pub standin: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AuditOn {
    #[default]
    All,
    Test,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DebiasFitOn {
    #[default]
    All,
    Train,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub name: String,
    pub data: DataSource,
    pub schema: Vec<ColumnSpec>,
    #[serde(default)]
    pub recipe: Vec<Step>,
    pub protected: String,
    pub target: String,
    pub model: ModelKind,
    #[serde(default)]
    pub debias: DebiasConfig,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub audit: AuditOptions,
    /// Stratify the audit on the target (classification studies).
    #[serde(default)]
    pub stratify: bool,
    #[serde(default)]
    pub audit_on: AuditOn,
    #[serde(default)]
    pub debias_fit_on: DebiasFitOn,
    #[serde(default = "default_test_fraction")]
    pub test_fraction: f64,
}

fn default_test_fraction() -> f64 {
    DEFAULT_TEST_FRACTION
}

impl StudyConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// Static checks; recipe/column agreement is checked by [`prepare`].
    pub fn validate(&self) -> Result<()> {
        validate_schema(&self.schema)?;
        if self.seeds.is_empty() {
            return Err(Error::Config("`seeds` is empty".into()));
        }
        if self.protected == self.target {
            return Err(Error::Config("protected and target are the same column".into()));
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::Config("test_fraction must be in (0, 1)".into()));
        }
        if let ModelKind::Ridge { lambda } = self.model {
            if !(lambda >= 0.0) || !lambda.is_finite() {
                return Err(Error::Config("ridge lambda must be finite and >= 0".into()));
            }
        }
        if let ModelKind::Logistic { train } = &self.model {
            train.validate()?;
        }
        self.debias.validate()?;
        if self.data.sha256.len() != 64 || !self.data.sha256.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(Error::Config("data.sha256 must be 64 hex digits".into()));
        }
        if self.data.file.contains("..") || Path::new(&self.data.file).is_absolute() {
            return Err(Error::Config("data.file must be a plain relative name".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedData {
    pub path: PathBuf,
    pub sha256: String,
    pub warnings: Vec<String>,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Finds the study's data file: first in `cache_dir` (if given), then in
/// `bundled_dir`. The file must match the configured checksum.
pub fn resolve_data(src: &DataSource, cache_dir: Option<&Path>, bundled_dir: &Path) -> Result<ResolvedData> {
    let mut warnings = Vec::new();
    let mut candidates = Vec::new();
    if let Some(dir) = cache_dir {
        candidates.push((dir.join(&src.file), false));
    }
    candidates.push((bundled_dir.join(&src.file), true));
    for (path, bundled) in candidates {
        if !path.is_file() {
            if !bundled {
                warnings.push(format!("{} not found; using the bundled copy", path.display()));
            }
            continue;
        }
        let found = sha256_file(&path)?;
        if !found.eq_ignore_ascii_case(&src.sha256) {
            return Err(Error::Checksum {
                path: path.clone(),
                expected: src.sha256.clone(),
                found,
            });
        }
        if src.standin {
            warnings.push(format!(
                "{} is a generated stand-in with the upstream schema, not the public dataset",
                src.file
            ));
        }
        return Ok(ResolvedData {
            path,
            sha256: found,
            warnings,
        });
    }
    let hint = src.url.as_deref().map(|u| format!(" (upstream: {u})")).unwrap_or_default();
    Err(Error::DataUnavailable(format!("{}{hint}", src.file)))
}

/// Loads and prepares the study table: recipe, then roles for the
/// protected and target columns.
pub fn prepare(cfg: &StudyConfig, path: &Path) -> Result<DataTable> {
    let raw = load_csv(path, &cfg.schema)?;
    prepare_table(cfg, &raw)
}

pub fn prepare_table(cfg: &StudyConfig, raw: &DataTable) -> Result<DataTable> {
    let t = apply_steps(raw, &cfg.recipe).map_err(|e| Error::Config(format!("recipe: {e}")))?;
    let t = set_role(&t, &cfg.protected, Role::Protected)
        .and_then(|t| set_role(&t, &cfg.target, Role::Target))
        .map_err(|e| Error::Config(format!("roles: {e}")))?;
    let target = t.column(&cfg.target)?;
    let binary = target.spec.kind.is_categorical() && target.spec.categories.len() == 2;
    match (&cfg.model, binary) {
        (ModelKind::Logistic { .. }, false) => {
            return Err(Error::Config(format!(
                "logistic model needs a binary target; `{}` is not",
                cfg.target
            )))
        }
        (ModelKind::Linear | ModelKind::Ridge { .. }, _) if target.spec.kind != ColumnKind::Numeric => {
            return Err(Error::Config(format!(
                "regression model needs a numeric target; `{}` is not",
                cfg.target
            )))
        }
        _ => {}
    }
    if !t.column(&cfg.protected)?.spec.kind.is_categorical() {
        return Err(Error::Config(format!(
            "protected column `{}` must be categorical after the recipe",
            cfg.protected
        )));
    }
    if t.columns().iter().any(|c| c.spec.role == Role::Drop) {
        return Err(Error::Config("recipe leaves role=drop columns; end it with remove_dropped".into()));
    }
    Ok(t)
}
