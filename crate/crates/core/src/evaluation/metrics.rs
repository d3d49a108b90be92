use super::MetricError;

/// Predictions `x` against ground truth `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationPair {
    pred: Vec<f64>,
    truth: Vec<f64>,
}

impl EvaluationPair {
    pub fn new(pred: Vec<f64>, truth: Vec<f64>) -> Result<Self, MetricError> {
        if pred.len() != truth.len() {
            return Err(MetricError::LengthMismatch(pred.len(), truth.len()));
        }
        if pred.len() < 2 {
            return Err(MetricError::TooFewSamples(pred.len()));
        }
        if pred.iter().chain(&truth).any(|v| !v.is_finite()) {
            return Err(MetricError::NonFinite);
        }
        Ok(EvaluationPair { pred, truth })
    }

    pub fn pred(&self) -> &[f64] {
        &self.pred
    }

    pub fn truth(&self) -> &[f64] {
        &self.truth
    }

    pub fn len(&self) -> usize {
        self.pred.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pred.is_empty()
    }

    fn truth_mean(&self) -> f64 {
        self.truth.iter().sum::<f64>() / self.truth.len() as f64
    }

    fn ss_res(&self) -> f64 {
        self.truth
            .iter()
            .zip(&self.pred)
            .map(|(y, x)| (y - x) * (y - x))
            .sum()
    }
}

/// Which denominator [`r_squared_with`] uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum R2Variant {
    /// `Σ(y_i − ȳ)²`
    #[default]
    Standard,
    /// `Σ(x_i − ȳ)²`, deviations of the predictions from the truth mean.
    Literal,
}

/// RMSE divided by the mean of the ground truth.
pub fn nrmse(p: &EvaluationPair) -> Result<f64, MetricError> {
    let mean = p.truth_mean();
    if mean.abs() < 1e-12 {
        return Err(MetricError::ZeroMeanTruth);
    }
    Ok((p.ss_res() / p.len() as f64).sqrt() / mean)
}

/// `1 − Σ(y − x)² / Σ(y − ȳ)²`.
pub fn r_squared(p: &EvaluationPair) -> Result<f64, MetricError> {
    r_squared_with(p, R2Variant::Standard)
}

pub fn r_squared_with(p: &EvaluationPair, variant: R2Variant) -> Result<f64, MetricError> {
    let mean = p.truth_mean();
    let dev = match variant {
        R2Variant::Standard => &p.truth,
        R2Variant::Literal => &p.pred,
    };
    let ss_tot: f64 = dev.iter().map(|v| (v - mean) * (v - mean)).sum();
    if ss_tot == 0.0 {
        return Err(MetricError::ConstantTruth);
    }
    Ok(1.0 - p.ss_res() / ss_tot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pair(x: &[f64], y: &[f64]) -> EvaluationPair {
        EvaluationPair::new(x.to_vec(), y.to_vec()).unwrap()
    }

    #[test]
    fn examples() {
        let y = [1.0, 1.0, 1.0, 1.0];
        assert_eq!(nrmse(&pair(&[0.0; 4], &y)).unwrap(), 1.0);
        let y = [0.3, 2.0, 1.1, 4.5];
        assert_eq!(nrmse(&pair(&y, &y)).unwrap(), 0.0);
        assert_eq!(r_squared(&pair(&y, &y)).unwrap(), 1.0);
        let m = y.iter().sum::<f64>() / 4.0;
        assert_eq!(r_squared(&pair(&[m; 4], &y)).unwrap(), 0.0);
        assert!(r_squared(&pair(&[4.5, 0.3, 2.0, 1.1], &y)).unwrap() < 0.0);
    }

    #[test]
    fn errors() {
        assert_eq!(
            nrmse(&pair(&[1.0, 2.0], &[-1.0, 1.0])),
            Err(MetricError::ZeroMeanTruth)
        );
        assert_eq!(
            r_squared(&pair(&[1.0, 2.0], &[3.0, 3.0])),
            Err(MetricError::ConstantTruth)
        );
        assert!(EvaluationPair::new(vec![1.0], vec![1.0]).is_err());
        assert!(EvaluationPair::new(vec![1.0, 2.0], vec![1.0]).is_err());
        assert!(EvaluationPair::new(vec![1.0, f64::NAN], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn literal_variant_uses_prediction_spread() {
        let y = [1.0, 2.0, 3.0, 4.0];
        let x = [2.5, 2.5, 2.5, 2.6];
        let p = pair(&x, &y);
        let ss_res: f64 = x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum();
        let ss_x: f64 = x.iter().map(|v| (v - 2.5) * (v - 2.5)).sum();
        let lit = r_squared_with(&p, R2Variant::Literal).unwrap();
        assert!((lit - (1.0 - ss_res / ss_x)).abs() < 1e-12);
        assert!(lit < -100.0);
    }

    #[test]
    fn brute_force_agreement() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let n = rng.gen_range(2..400);
            let y: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..8.0)).collect();
            let x: Vec<f64> = y.iter().map(|v| v + rng.gen_range(-2.0..2.0)).collect();
            let p = pair(&x, &y);
            let mut sum_y = 0.0;
            for v in &y {
                sum_y += v;
            }
            let mean = sum_y / n as f64;
            let (mut sse, mut sst) = (0.0, 0.0);
            for i in 0..n {
                sse += (y[i] - x[i]).powi(2);
                sst += (y[i] - mean).powi(2);
            }
            let want_nrmse = (sse / n as f64).sqrt() / mean;
            assert!((nrmse(&p).unwrap() - want_nrmse).abs() < 1e-12);
            assert!((r_squared(&p).unwrap() - (1.0 - sse / sst)).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn nrmse_permutation_invariant(
            v in prop::collection::vec((0.1f64..10.0, -5.0f64..5.0), 2..60),
            seed in 0u64..1000,
        ) {
            let y: Vec<f64> = v.iter().map(|p| p.0).collect();
            let x: Vec<f64> = v.iter().map(|p| p.0 + p.1).collect();
            let mut idx: Vec<usize> = (0..y.len()).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for i in (1..idx.len()).rev() {
                idx.swap(i, rng.gen_range(0..=i));
            }
            let xp: Vec<f64> = idx.iter().map(|&i| x[i]).collect();
            let yp: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
            let a = nrmse(&pair(&x, &y)).unwrap();
            let b = nrmse(&pair(&xp, &yp)).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }

        #[test]
        fn r2_at_most_one(v in prop::collection::vec((-10.0f64..10.0, -3.0f64..3.0), 3..60)) {
            let y: Vec<f64> = v.iter().map(|p| p.0).collect();
            let x: Vec<f64> = v.iter().map(|p| p.0 + p.1).collect();
            if let Ok(r2) = r_squared(&pair(&x, &y)) {
                prop_assert!(r2 <= 1.0);
                if x != y {
                    prop_assert!(r2 < 1.0);
                }
            }
        }
    }
}
