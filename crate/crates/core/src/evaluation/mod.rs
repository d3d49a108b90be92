//! NRMSE and R² metrics and the leave-one-subject-out harness over
//! (composition, model) cells.

mod io;
mod loso;
mod metrics;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::features::{Composition, FeatureError};
use crate::models::ModelError;

pub use io::{
    parse_results_csv, parse_trace_csv, trace_file_name, write_failures_csv, write_results_csv,
    write_trace_csv, RESULTS_HEADER, TRACE_HEADER,
};
pub use loso::{
    loso, loso_prepared, loso_with_models, predict_artifact, subject_windows, train_fold,
    LosoConfig, SubjectWindows,
};
pub use metrics::{nrmse, r_squared, r_squared_with, EvaluationPair, R2Variant};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("prediction and truth lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("non-finite value")]
    NonFinite,
    #[error("ground truth mean is zero")]
    ZeroMeanTruth,
    #[error("ground truth is constant")]
    ConstantTruth,
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("leave-one-subject-out needs at least 2 subjects, got {0}")]
    TooFewSubjects(usize),
    #[error("no training windows")]
    NoTrainingData,
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error("results file: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModelKind {
    Lr,
    CnnLstm,
}

impl ModelKind {
    pub const ALL: [ModelKind; 2] = [ModelKind::Lr, ModelKind::CnnLstm];

    /// Name used in result tables.
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Lr => "LR",
            ModelKind::CnnLstm => "CNN-LSTM",
        }
    }

    /// Lower-case name used in file names and flags.
    pub fn slug(self) -> &'static str {
        match self {
            ModelKind::Lr => "lr",
            ModelKind::CnnLstm => "cnn-lstm",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelKind::ALL
            .into_iter()
            .find(|m| m.slug().eq_ignore_ascii_case(s) || m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown model `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub t_s: f64,
    pub truth: f64,
    pub pred: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldResult {
    pub subject: String,
    pub nrmse: f64,
    pub r2: f64,
    pub trace: Vec<TracePoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldFailure {
    pub subject: String,
    pub reason: String,
}

/// All folds of one (composition, model) cell, ordered by subject id.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub composition: Composition,
    pub model: ModelKind,
    pub folds: Vec<FoldResult>,
    pub failures: Vec<FoldFailure>,
}

impl ExperimentResult {
    pub fn subjects(&self) -> Vec<&str> {
        self.folds.iter().map(|f| f.subject.as_str()).collect()
    }

    pub fn mean_r2(&self) -> f64 {
        self.folds.iter().map(|f| f.r2).sum::<f64>() / self.folds.len() as f64
    }

    pub fn mean_nrmse(&self) -> f64 {
        self.folds.iter().map(|f| f.nrmse).sum::<f64>() / self.folds.len() as f64
    }
}
