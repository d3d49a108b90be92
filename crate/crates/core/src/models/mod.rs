//! PAEE estimators: least squares on IAA_tot features and a CNN-LSTM on raw
//! 1 Hz acceleration windows.

mod artifact;
mod cnn_lstm;
mod dd;
mod linear;
mod train;

use thiserror::Error;

pub use artifact::{ArtifactError, ModelArtifact, ARTIFACT_MAGIC};
pub use cnn_lstm::{
    cnn_lstm_forward, gradient_check, init_cnn_lstm, loss_and_gradient, CnnLstmConfig,
    CnnLstmWeights, ParamSpec, REFINE_ABOVE,
};
pub use linear::{fit_ols, predict_linear, LinearModel, OlsFit, OlsWarning};
pub use train::{
    cnn_lstm_train, fit_cnn_lstm, predict_cnn_lstm, CnnLstmModel, Standardizer, TrainConfig,
    TrainOutcome, ADAM_BETA1, ADAM_BETA2, ADAM_EPS, DIVERGENCE_FACTOR,
};

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("need more samples than regressors (n = {n}, p = {p})")]
    TooFewSamples { n: usize, p: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("empty training set")]
    EmptyDataset,
    #[error("training diverged in epoch {epoch} (batch loss {loss})")]
    DivergedLoss { epoch: usize, loss: f64 },
    #[error("numerical failure: {0}")]
    Numerical(String),
}
