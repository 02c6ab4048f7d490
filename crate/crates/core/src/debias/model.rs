use serde::{Deserialize, Serialize};

use super::DebiasConfig;
use crate::error::{Error, Result};
use crate::ml::{Activation, Mlp, ModelFile};
use crate::tabular::{ColumnSpec, DataTable, Encoder};

pub const ARTIFACT_FORMAT: &str = "fairprep-debias/1";

/// A trained debiaser. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct DebiasModel {
    columns: Encoder,
    encoder: Mlp,
    decoder: Mlp,
    adversaries: Vec<Mlp>,
    protected: Vec<ColumnSpec>,
    config: DebiasConfig,
    warnings: Vec<String>,
}

/// On-disk form of a [`DebiasModel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DebiasArtifact {
    pub format: String,
    pub columns: Encoder,
    pub encoder: ModelFile,
    pub decoder: ModelFile,
    pub adversaries: Vec<ModelFile>,
    pub protected: Vec<ColumnSpec>,
    pub config: DebiasConfig,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl DebiasModel {
    pub(crate) fn from_parts(
        columns: Encoder,
        encoder: Mlp,
        decoder: Mlp,
        adversaries: Vec<Mlp>,
        protected: Vec<ColumnSpec>,
        config: DebiasConfig,
        warnings: Vec<String>,
    ) -> Result<Self> {
        let d = columns.width();
        let latent = encoder.output_dim();
        if encoder.input_dim() != d || decoder.output_dim() != d {
            return Err(Error::Dimension(format!(
                "encoder/decoder widths {}→{} do not match {d} design columns",
                encoder.input_dim(),
                decoder.output_dim()
            )));
        }
        if decoder.input_dim() != latent {
            return Err(Error::Dimension("decoder input is not the latent width".into()));
        }
        if adversaries.len() != protected.len() || adversaries.is_empty() {
            return Err(Error::Dimension("one adversary per protected column".into()));
        }
        for (a, p) in adversaries.iter().zip(&protected) {
            if a.input_dim() != latent || a.output_dim() != p.categories.len() {
                return Err(Error::Dimension(format!(
                    "adversary for `{}` has dims {:?}",
                    p.name,
                    a.dims()
                )));
            }
            if a.output_activation() != Activation::Softmax {
                return Err(Error::InvalidArgument("adversary output must be softmax".into()));
            }
        }
        for p in &protected {
            if !columns.schema().iter().any(|s| s == p) {
                return Err(Error::SchemaMismatch(format!(
                    "protected column `{}` is not in the fitted schema",
                    p.name
                )));
            }
        }
        Ok(Self {
            columns,
            encoder,
            decoder,
            adversaries,
            protected,
            config,
            warnings,
        })
    }

    pub fn columns(&self) -> &Encoder {
        &self.columns
    }

    pub fn encoder(&self) -> &Mlp {
        &self.encoder
    }

    pub fn decoder(&self) -> &Mlp {
        &self.decoder
    }

    pub fn adversaries(&self) -> &[Mlp] {
        &self.adversaries
    }

    pub fn protected(&self) -> &[ColumnSpec] {
        &self.protected
    }

    pub fn config(&self) -> &DebiasConfig {
        &self.config
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn latent_dim(&self) -> usize {
        self.encoder.output_dim()
    }

    /// Features → code → reconstruction → source schema. Non-feature
    /// columns pass through untouched.
    pub fn transform(&self, table: &DataTable) -> Result<DataTable> {
        let design = self.columns.encode(table)?;
        let z = self.encoder.predict(&design.values)?;
        let recon = self.decoder.predict(&z)?;
        design.with_values(recon)?.decode()
    }

    /// Latent codes for `table`; used by tests and diagnostics.
    pub fn codes(&self, table: &DataTable) -> Result<crate::linalg::Matrix> {
        let design = self.columns.encode(table)?;
        self.encoder.predict(&design.values)
    }

    pub fn to_artifact(&self) -> DebiasArtifact {
        DebiasArtifact {
            format: ARTIFACT_FORMAT.to_string(),
            columns: self.columns.clone(),
            encoder: ModelFile::from_mlp(&self.encoder),
            decoder: ModelFile::from_mlp(&self.decoder),
            adversaries: self.adversaries.iter().map(ModelFile::from_mlp).collect(),
            protected: self.protected.clone(),
            config: self.config.clone(),
            seed: self.config.seed,
            warnings: self.warnings.clone(),
        }
    }

    pub fn from_artifact(a: DebiasArtifact) -> Result<Self> {
        if a.format != ARTIFACT_FORMAT {
            return Err(Error::InvalidArgument(format!(
                "unsupported artifact format `{}`",
                a.format
            )));
        }
        a.config.validate()?;
        if a.seed != a.config.seed {
            return Err(Error::InvalidArgument("artifact seed disagrees with config".into()));
        }
        let advs = a
            .adversaries
            .iter()
            .map(ModelFile::to_mlp)
            .collect::<Result<Vec<_>>>()?;
        Self::from_parts(
            a.columns,
            a.encoder.to_mlp()?,
            a.decoder.to_mlp()?,
            advs,
            a.protected,
            a.config,
            a.warnings,
        )
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_artifact())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_artifact(serde_json::from_str(text)?)
    }
}
