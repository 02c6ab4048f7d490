//! JSON model files: kind, layer dims, flattened parameters and the training
//! configuration that produced them.

use serde::{Deserialize, Serialize};

use super::linear::{LinearKind, LinearModel, TrainConfig};
use super::mlp::{Activation, Dense, Mlp};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelFile {
    Linear {
        dims: Vec<usize>,
        parameters: Vec<f64>,
        ridge_lambda: f64,
    },
    Logistic {
        dims: Vec<usize>,
        parameters: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        config: Option<TrainConfig>,
    },
    Mlp {
        dims: Vec<usize>,
        hidden: Activation,
        output: Activation,
        parameters: Vec<f64>,
    },
}

impl ModelFile {
    pub fn from_linear(model: &LinearModel, config: Option<TrainConfig>) -> Self {
        let dims = vec![model.weights.len(), 1];
        let mut parameters = model.weights.clone();
        parameters.push(model.intercept);
        match model.kind {
            LinearKind::Linear => ModelFile::Linear {
                dims,
                parameters,
                ridge_lambda: model.ridge_lambda,
            },
            LinearKind::Logistic => ModelFile::Logistic {
                dims,
                parameters,
                config,
            },
        }
    }

    pub fn from_mlp(net: &Mlp) -> Self {
        ModelFile::Mlp {
            dims: net.dims(),
            hidden: net.hidden_activation(),
            output: net.output_activation(),
            parameters: net.parameters(),
        }
    }

    pub fn to_linear(&self) -> Result<LinearModel> {
        let (kind, dims, parameters, ridge_lambda) = match self {
            ModelFile::Linear {
                dims,
                parameters,
                ridge_lambda,
            } => (LinearKind::Linear, dims, parameters, *ridge_lambda),
            ModelFile::Logistic {
                dims, parameters, ..
            } => (LinearKind::Logistic, dims, parameters, 0.0),
            ModelFile::Mlp { .. } => {
                return Err(Error::InvalidArgument("model file holds a network".into()))
            }
        };
        if dims.len() != 2 || dims[1] != 1 || parameters.len() != dims[0] + 1 {
            return Err(Error::Dimension(format!(
                "linear model dims {dims:?} with {} parameters",
                parameters.len()
            )));
        }
        if parameters.iter().any(|p| !p.is_finite()) || !(ridge_lambda >= 0.0) {
            return Err(Error::NonFinite);
        }
        Ok(LinearModel {
            kind,
            weights: parameters[..dims[0]].to_vec(),
            intercept: parameters[dims[0]],
            ridge_lambda,
        })
    }

    pub fn to_mlp(&self) -> Result<Mlp> {
        let ModelFile::Mlp {
            dims,
            hidden,
            output,
            parameters,
        } = self
        else {
            return Err(Error::InvalidArgument("model file holds a linear model".into()));
        };
        if dims.len() < 2 || dims.iter().any(|&d| d == 0) {
            return Err(Error::Dimension(format!("network dims {dims:?}")));
        }
        let expected: usize = dims.windows(2).map(|w| w[0] * w[1] + w[1]).sum();
        if parameters.len() != expected {
            return Err(Error::Dimension(format!(
                "{} parameters for dims {dims:?} (expected {expected})",
                parameters.len()
            )));
        }
        let mut off = 0;
        let mut layers = Vec::with_capacity(dims.len() - 1);
        for w in dims.windows(2) {
            let nw = w[0] * w[1];
            let weights = Matrix::from_vec(w[0], w[1], parameters[off..off + nw].to_vec())?;
            off += nw;
            let bias = parameters[off..off + w[1]].to_vec();
            off += w[1];
            layers.push(Dense { weights, bias });
        }
        Mlp::from_layers(layers, *hidden, *output)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
