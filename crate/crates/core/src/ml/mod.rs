//! Numerical core: feed-forward networks with backpropagation, losses,
//! optimizers, and the linear/logistic models used downstream.

mod artifact;
mod linear;
pub mod loss;
mod metrics;
mod mlp;
mod optim;

pub use artifact::ModelFile;
pub use linear::{
    fit_linear, fit_logistic, fit_logistic_traced, logistic_objective, predict, LinearKind,
    LinearModel, TrainConfig,
};
pub use metrics::{accuracy, auc, r_squared};
pub use mlp::{sigmoid, softmax_inplace, Activation, Dense, ForwardCache, Gradients, Mlp};
pub use optim::Adam;
