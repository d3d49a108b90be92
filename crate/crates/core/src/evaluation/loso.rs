use rayon::prelude::*;

use super::metrics::{nrmse, r_squared_with, EvaluationPair, R2Variant};
use super::{EvalError, ExperimentResult, FoldFailure, FoldResult, ModelKind, TracePoint};
use crate::data::Dataset;
use crate::features::{build_supervised_windows, Composition, FeatureError, SupervisedWindow, WindowSpec};
use crate::models::{
    fit_cnn_lstm, fit_ols, predict_cnn_lstm, predict_linear, CnnLstmConfig, ModelArtifact,
    TrainConfig,
};
use crate::preprocess::{prepare_dataset, PreparedSubject};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LosoConfig {
    pub window: WindowSpec,
    pub train: TrainConfig,
    /// Keep every `train_stride`-th window of each training subject for
    /// CNN-LSTM training. Evaluation always uses every window.
    pub train_stride: usize,
    pub r2_variant: R2Variant,
}

impl Default for LosoConfig {
    fn default() -> Self {
        LosoConfig {
            window: WindowSpec::default(),
            train: TrainConfig::default(),
            train_stride: 1,
            r2_variant: R2Variant::Standard,
        }
    }
}

/// Windows of one subject, or the reason there are none.
pub type SubjectWindows = (String, Result<Vec<SupervisedWindow>, FeatureError>);

pub fn subject_windows(
    subjects: &[PreparedSubject],
    comp: Composition,
    window: WindowSpec,
) -> Vec<SubjectWindows> {
    subjects
        .par_iter()
        .map(|s| {
            (
                s.id.clone(),
                build_supervised_windows(&s.acc, &s.paee, comp, window, &s.id),
            )
        })
        .collect()
}

/// Fits the model of the fold that holds out `held_out`, from every other
/// subject's windows. Nothing of `held_out` is read.
pub fn train_fold(
    windows: &[SubjectWindows],
    held_out: &str,
    comp: Composition,
    model: ModelKind,
    cfg: &LosoConfig,
) -> Result<ModelArtifact, EvalError> {
    let stride = match model {
        ModelKind::Lr => 1,
        ModelKind::CnnLstm => cfg.train_stride.max(1),
    };
    let train: Vec<&SupervisedWindow> = windows
        .iter()
        .filter(|(id, _)| id != held_out)
        .filter_map(|(_, w)| w.as_ref().ok())
        .flat_map(|w| w.iter().step_by(stride))
        .collect();
    if train.is_empty() {
        return Err(EvalError::NoTrainingData);
    }
    match model {
        ModelKind::Lr => {
            let x: Vec<Vec<f64>> = train.iter().map(|w| w.iaa.clone()).collect();
            let y: Vec<f64> = train.iter().map(|w| w.target).collect();
            Ok(ModelArtifact::Linear(fit_ols(&x, &y)?.model))
        }
        ModelKind::CnnLstm => {
            let owned: Vec<SupervisedWindow> = train.into_iter().cloned().collect();
            let ncfg = CnnLstmConfig::new(comp.channels(), cfg.train.seed);
            let (m, history) = fit_cnn_lstm(&owned, &ncfg, &cfg.train)?;
            log::debug!(
                "{} fold {held_out}: loss {:?}",
                comp.name(),
                history
            );
            Ok(ModelArtifact::CnnLstm(m))
        }
    }
}

pub fn predict_artifact(
    art: &ModelArtifact,
    windows: &[SupervisedWindow],
) -> Result<Vec<f64>, EvalError> {
    Ok(match art {
        ModelArtifact::Linear(m) => {
            let x: Vec<Vec<f64>> = windows.iter().map(|w| w.iaa.clone()).collect();
            predict_linear(m, &x)?
        }
        ModelArtifact::CnnLstm(m) => predict_cnn_lstm(m, windows)?,
    })
}

fn evaluate_fold(
    windows: &[SubjectWindows],
    idx: usize,
    comp: Composition,
    model: ModelKind,
    cfg: &LosoConfig,
) -> Result<(FoldResult, ModelArtifact), EvalError> {
    let (id, own) = &windows[idx];
    let own = own.as_ref().map_err(|e| EvalError::Feature(e.clone()))?;
    let art = train_fold(windows, id, comp, model, cfg)?;
    let pred = predict_artifact(&art, own)?;
    let truth: Vec<f64> = own.iter().map(|w| w.target).collect();
    let pair = EvaluationPair::new(pred.clone(), truth.clone())?;
    let fold = FoldResult {
        subject: id.clone(),
        nrmse: nrmse(&pair)?,
        r2: r_squared_with(&pair, cfg.r2_variant)?,
        trace: own
            .iter()
            .zip(pred.iter().zip(&truth))
            .map(|(w, (p, t))| TracePoint {
                t_s: w.target_time,
                truth: *t,
                pred: *p,
            })
            .collect(),
    };
    Ok((fold, art))
}

/// Leave-one-subject-out over already prepared subjects. Folds run
/// concurrently; results come back ordered by subject id. Returns each
/// successful fold's model next to the result.
pub fn loso_with_models(
    subjects: &[PreparedSubject],
    comp: Composition,
    model: ModelKind,
    cfg: &LosoConfig,
) -> Result<(ExperimentResult, Vec<(String, ModelArtifact)>), EvalError> {
    if subjects.len() < 2 {
        return Err(EvalError::TooFewSubjects(subjects.len()));
    }
    let mut windows = subject_windows(subjects, comp, cfg.window);
    windows.sort_by(|a, b| a.0.cmp(&b.0));
    let outcomes: Vec<_> = (0..windows.len())
        .into_par_iter()
        .map(|i| evaluate_fold(&windows, i, comp, model, cfg))
        .collect();
    let mut result = ExperimentResult {
        composition: comp,
        model,
        folds: Vec::new(),
        failures: Vec::new(),
    };
    let mut models = Vec::new();
    for ((id, _), out) in windows.iter().zip(outcomes) {
        match out {
            Ok((fold, art)) => {
                result.folds.push(fold);
                models.push((id.clone(), art));
            }
            Err(e) => {
                log::warn!("{} / {} fold {id} failed: {e}", comp.name(), model.name());
                result.failures.push(FoldFailure {
                    subject: id.clone(),
                    reason: e.to_string(),
                });
            }
        }
    }
    Ok((result, models))
}

pub fn loso_prepared(
    subjects: &[PreparedSubject],
    comp: Composition,
    model: ModelKind,
    cfg: &LosoConfig,
) -> Result<ExperimentResult, EvalError> {
    loso_with_models(subjects, comp, model, cfg).map(|(r, _)| r)
}

/// Preprocesses the dataset and runs [`loso_prepared`]. Subjects that fail
/// preprocessing are reported as failed folds.
pub fn loso(
    ds: &Dataset,
    comp: Composition,
    model: ModelKind,
    cfg: &LosoConfig,
) -> Result<ExperimentResult, EvalError> {
    if ds.len() < 2 {
        return Err(EvalError::TooFewSubjects(ds.len()));
    }
    let mut ok = Vec::new();
    let mut failures = Vec::new();
    for (rec, prepared) in ds.subjects().iter().zip(prepare_dataset(ds)) {
        match prepared {
            Ok(p) => ok.push(p),
            Err(e) => failures.push(FoldFailure {
                subject: rec.id().to_string(),
                reason: e.to_string(),
            }),
        }
    }
    let mut result = if ok.len() >= 2 {
        loso_prepared(&ok, comp, model, cfg)?
    } else {
        ExperimentResult {
            composition: comp,
            model,
            folds: Vec::new(),
            failures: ok
                .iter()
                .map(|p| FoldFailure {
                    subject: p.id.clone(),
                    reason: EvalError::NoTrainingData.to_string(),
                })
                .collect(),
        }
    };
    result.failures.extend(failures);
    result.failures.sort_by(|a, b| a.subject.cmp(&b.subject));
    Ok(result)
}
