use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::cnn_lstm::{init_cnn_lstm, CnnLstmConfig, CnnLstmWeights, Workspace};
use super::ModelError;
use crate::features::SupervisedWindow;

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPS: f64 = 1e-8;
/// A batch loss above this multiple of the initial loss counts as divergence.
pub const DIVERGENCE_FACTOR: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    /// Seeds the per-epoch shuffle.
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 1e-3,
            epochs: 5,
            batch_size: 64,
            seed: 42,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(ModelError::InvalidConfig(
                "learning_rate must be positive".into(),
            ));
        }
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(ModelError::InvalidConfig(
                "epochs and batch_size must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub weights: CnnLstmWeights,
    /// Full-data MSE before training, then the mean batch loss of each epoch.
    pub loss_history: Vec<f64>,
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    step: i32,
}

impl Adam {
    fn new(n: usize) -> Self {
        Adam {
            m: vec![0.0; n],
            v: vec![0.0; n],
            step: 0,
        }
    }

    fn update(&mut self, params: &mut [f64], grad: &[f64], lr: f64) {
        self.step += 1;
        let c1 = 1.0 - ADAM_BETA1.powi(self.step);
        let c2 = 1.0 - ADAM_BETA2.powi(self.step);
        for i in 0..params.len() {
            let g = grad[i];
            self.m[i] = ADAM_BETA1 * self.m[i] + (1.0 - ADAM_BETA1) * g;
            self.v[i] = ADAM_BETA2 * self.v[i] + (1.0 - ADAM_BETA2) * g * g;
            let m_hat = self.m[i] / c1;
            let v_hat = self.v[i] / c2;
            params[i] -= lr * m_hat / (v_hat.sqrt() + ADAM_EPS);
        }
    }
}

/// Trains on the windows as given (no standardization).
pub fn cnn_lstm_train(
    data: &[SupervisedWindow],
    cfg: &CnnLstmConfig,
    tcfg: &TrainConfig,
) -> Result<TrainOutcome, ModelError> {
    let inputs: Vec<&[f64]> = data.iter().map(|w| w.tensor.as_slice()).collect();
    let targets: Vec<f64> = data.iter().map(|w| w.target).collect();
    train_arrays(&inputs, &targets, cfg, tcfg)
}

pub(crate) fn train_arrays(
    inputs: &[&[f64]],
    targets: &[f64],
    cfg: &CnnLstmConfig,
    tcfg: &TrainConfig,
) -> Result<TrainOutcome, ModelError> {
    tcfg.validate()?;
    if inputs.is_empty() {
        return Err(ModelError::EmptyDataset);
    }
    let mut weights = init_cnn_lstm(cfg)?;
    let width = inputs[0].len();
    for x in inputs {
        if x.len() != width {
            return Err(ModelError::ShapeMismatch {
                expected: width,
                got: x.len(),
            });
        }
        weights.check_input(x)?;
    }

    let mut ws = Workspace::default();
    let initial = inputs
        .iter()
        .zip(targets)
        .map(|(x, t)| (weights.forward_ws(x, &mut ws) - t).powi(2))
        .sum::<f64>()
        / inputs.len() as f64;
    let mut history = vec![initial];
    let limit = DIVERGENCE_FACTOR * initial.max(1e-12);

    let mut rng = ChaCha8Rng::seed_from_u64(tcfg.seed);
    let mut order: Vec<usize> = (0..inputs.len()).collect();
    let mut adam = Adam::new(weights.params().len());
    let mut grad = vec![0.0; weights.params().len()];
    for epoch in 0..tcfg.epochs {
        order.shuffle(&mut rng);
        let mut sse = 0.0;
        for batch in order.chunks(tcfg.batch_size) {
            grad.fill(0.0);
            let scale = 2.0 / batch.len() as f64;
            let mut batch_sse = 0.0;
            for &i in batch {
                let y = weights.forward_ws(inputs[i], &mut ws);
                let r = y - targets[i];
                batch_sse += r * r;
                weights.backward_ws(&mut ws, scale * r, &mut grad, false);
            }
            let batch_loss = batch_sse / batch.len() as f64;
            if !batch_loss.is_finite() || batch_loss > limit || grad.iter().any(|g| !g.is_finite())
            {
                return Err(ModelError::DivergedLoss {
                    epoch,
                    loss: batch_loss,
                });
            }
            sse += batch_sse;
            adam.update(weights.params_mut(), &grad, tcfg.learning_rate);
        }
        let epoch_loss = sse / inputs.len() as f64;
        log::debug!("epoch {} loss {epoch_loss:.6}", epoch + 1);
        history.push(epoch_loss);
    }
    Ok(TrainOutcome {
        weights,
        loss_history: history,
    })
}

/// Per-channel input and target standardization fitted on training windows.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub channel_mean: Vec<f64>,
    pub channel_std: Vec<f64>,
    pub target_mean: f64,
    pub target_std: f64,
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let sd = var.sqrt();
    // constant channels pass through centred but unscaled
    (mean, if sd > 1e-12 { sd } else { 1.0 })
}

impl Standardizer {
    pub fn fit(data: &[SupervisedWindow]) -> Result<Self, ModelError> {
        let first = data.first().ok_or(ModelError::EmptyDataset)?;
        let channels = first.channels;
        let mut channel_mean = Vec::with_capacity(channels);
        let mut channel_std = Vec::with_capacity(channels);
        for c in 0..channels {
            let (m, s) = mean_std(data.iter().flat_map(move |w| w.channel(c).iter().copied()));
            channel_mean.push(m);
            channel_std.push(s);
        }
        let (target_mean, target_std) = mean_std(data.iter().map(|w| w.target));
        Ok(Standardizer {
            channel_mean,
            channel_std,
            target_mean,
            target_std,
        })
    }

    pub fn transform_input(&self, w: &SupervisedWindow) -> Vec<f64> {
        let mut out = Vec::with_capacity(w.tensor.len());
        for c in 0..w.channels {
            let (m, s) = (self.channel_mean[c], self.channel_std[c]);
            out.extend(w.channel(c).iter().map(|v| (v - m) / s));
        }
        out
    }

    pub fn transform_target(&self, y: f64) -> f64 {
        (y - self.target_mean) / self.target_std
    }

    pub fn inverse_target(&self, z: f64) -> f64 {
        z * self.target_std + self.target_mean
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CnnLstmModel {
    pub weights: CnnLstmWeights,
    pub scaler: Standardizer,
    pub train: TrainConfig,
}

/// Standardizes inputs and targets with statistics of `data`, then trains.
pub fn fit_cnn_lstm(
    data: &[SupervisedWindow],
    cfg: &CnnLstmConfig,
    tcfg: &TrainConfig,
) -> Result<(CnnLstmModel, Vec<f64>), ModelError> {
    let scaler = Standardizer::fit(data)?;
    if data.iter().any(|w| w.channels != cfg.in_channels) {
        return Err(ModelError::ShapeMismatch {
            expected: cfg.in_channels,
            got: data
                .iter()
                .find(|w| w.channels != cfg.in_channels)
                .map_or(0, |w| w.channels),
        });
    }
    let inputs: Vec<Vec<f64>> = data.iter().map(|w| scaler.transform_input(w)).collect();
    let refs: Vec<&[f64]> = inputs.iter().map(Vec::as_slice).collect();
    let targets: Vec<f64> = data
        .iter()
        .map(|w| scaler.transform_target(w.target))
        .collect();
    let out = train_arrays(&refs, &targets, cfg, tcfg)?;
    Ok((
        CnnLstmModel {
            weights: out.weights,
            scaler,
            train: *tcfg,
        },
        out.loss_history,
    ))
}

pub fn predict_cnn_lstm(
    m: &CnnLstmModel,
    data: &[SupervisedWindow],
) -> Result<Vec<f64>, ModelError> {
    let mut ws = Workspace::default();
    data.iter()
        .map(|w| {
            if w.channels != m.weights.config().in_channels {
                return Err(ModelError::ShapeMismatch {
                    expected: m.weights.config().in_channels,
                    got: w.channels,
                });
            }
            let x = m.scaler.transform_input(w);
            m.weights.check_input(&x)?;
            Ok(m.scaler.inverse_target(m.weights.forward_ws(&x, &mut ws)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn windows(
        n: usize,
        channels: usize,
        seed: u64,
        target: impl Fn(&[f64]) -> f64,
    ) -> Vec<SupervisedWindow> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|k| {
                let tensor: Vec<f64> = (0..channels * 30)
                    .map(|_| rng.gen_range(-1.0..1.0))
                    .collect();
                SupervisedWindow {
                    target: target(&tensor),
                    tensor,
                    channels,
                    width: 30,
                    iaa: vec![],
                    subject: "S01".into(),
                    target_time: k as f64,
                }
            })
            .collect()
    }

    #[test]
    fn constant_target_loss_drops() {
        let data = windows(128, 3, 1, |_| 1.5);
        let tcfg = TrainConfig {
            epochs: 3,
            ..TrainConfig::default()
        };
        let out = cnn_lstm_train(&data, &CnnLstmConfig::new(3, 42), &tcfg).unwrap();
        assert_eq!(out.loss_history.len(), 4);
        assert!(out.loss_history[3] < out.loss_history[0]);
    }

    #[test]
    fn training_is_bit_reproducible() {
        let data = windows(100, 3, 2, |x| x.iter().sum::<f64>() / 90.0);
        let tcfg = TrainConfig {
            epochs: 2,
            batch_size: 16,
            ..TrainConfig::default()
        };
        let a = cnn_lstm_train(&data, &CnnLstmConfig::new(3, 42), &tcfg).unwrap();
        let b = cnn_lstm_train(&data, &CnnLstmConfig::new(3, 42), &tcfg).unwrap();
        assert!(a
            .weights
            .params()
            .iter()
            .zip(b.weights.params())
            .all(|(x, y)| x.to_bits() == y.to_bits()));
        assert_eq!(a.loss_history, b.loss_history);
    }

    #[test]
    fn huge_learning_rate_diverges() {
        let data = windows(256, 3, 3, |x| 4.0 * x.iter().sum::<f64>() / 90.0);
        let tcfg = TrainConfig {
            learning_rate: 1e3,
            epochs: 3,
            ..TrainConfig::default()
        };
        assert!(matches!(
            cnn_lstm_train(&data, &CnnLstmConfig::new(3, 42), &tcfg),
            Err(ModelError::DivergedLoss { .. })
        ));
    }

    #[test]
    fn empty_and_invalid() {
        let cfg = CnnLstmConfig::new(3, 1);
        assert_eq!(
            cnn_lstm_train(&[], &cfg, &TrainConfig::default()),
            Err(ModelError::EmptyDataset)
        );
        let bad = TrainConfig {
            epochs: 0,
            ..TrainConfig::default()
        };
        assert!(matches!(
            cnn_lstm_train(&windows(4, 3, 1, |_| 0.0), &cfg, &bad),
            Err(ModelError::InvalidConfig(_))
        ));
    }

    #[test]
    fn standardizer_round_trip() {
        let data = windows(20, 3, 4, |x| 10.0 + x[0]);
        let s = Standardizer::fit(&data).unwrap();
        for w in &data {
            let z = s.transform_target(w.target);
            assert!((s.inverse_target(z) - w.target).abs() < 1e-12);
        }
        let all: Vec<f64> = data
            .iter()
            .flat_map(|w| s.transform_input(w)[..30].to_vec())
            .collect();
        let mean = all.iter().sum::<f64>() / all.len() as f64;
        assert!(mean.abs() < 1e-12);
    }
}
