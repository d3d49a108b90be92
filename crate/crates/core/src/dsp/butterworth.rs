use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::DspError;

/// Transfer-function coefficients `b(z) / a(z)` with `a[0] == 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct IirCoefficients {
    b: Vec<f64>,
    a: Vec<f64>,
}

impl IirCoefficients {
    /// Normalizes so that `a[0] == 1` and rejects unstable denominators.
    pub fn new(b: Vec<f64>, a: Vec<f64>) -> Result<Self, DspError> {
        if b.is_empty() || a.is_empty() {
            return Err(DspError::InvalidCoefficients("empty polynomial".into()));
        }
        let a0 = a[0];
        if a0 == 0.0 || !a0.is_finite() {
            return Err(DspError::InvalidCoefficients(
                "a[0] must be non-zero".into(),
            ));
        }
        if b.iter().chain(&a).any(|v| !v.is_finite()) {
            return Err(DspError::InvalidCoefficients(
                "non-finite coefficient".into(),
            ));
        }
        let coef = IirCoefficients {
            b: b.iter().map(|v| v / a0).collect(),
            a: a.iter().map(|v| v / a0).collect(),
        };
        if !coef.is_stable() {
            return Err(DspError::InvalidCoefficients(
                "poles on or outside the unit circle".into(),
            ));
        }
        Ok(coef)
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    /// `b(1) / a(1)`.
    pub fn dc_gain(&self) -> f64 {
        self.b.iter().sum::<f64>() / self.a.iter().sum::<f64>()
    }

    /// Complex frequency response at normalized angular frequency `omega` (rad/sample).
    pub fn response(&self, omega: f64) -> Complex64 {
        let eval = |c: &[f64]| {
            c.iter()
                .enumerate()
                .map(|(k, &v)| v * Complex64::from_polar(1.0, -omega * k as f64))
                .sum::<Complex64>()
        };
        eval(&self.b) / eval(&self.a)
    }

    /// True when every root of `a(z)` lies strictly inside the unit circle,
    /// from the eigenvalues of the companion matrix.
    pub fn is_stable(&self) -> bool {
        let mut poly = self.a.clone();
        while poly.len() > 1 && *poly.last().unwrap() == 0.0 {
            poly.pop();
        }
        let order = poly.len() - 1;
        if order == 0 {
            return true;
        }
        let companion = DMatrix::from_fn(order, order, |r, c| {
            if r == 0 {
                -poly[c + 1]
            } else if r == c + 1 {
                1.0
            } else {
                0.0
            }
        });
        companion
            .complex_eigenvalues()
            .iter()
            .all(|z| z.norm() < 1.0)
    }
}

/// Expands `prod (z - r_i)` into descending-power coefficients.
fn poly_from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (i, &ci) in c.iter().enumerate() {
            next[i] += ci;
            next[i + 1] -= ci * r;
        }
        c = next;
    }
    c
}

/// Digital poles of the Butterworth low-pass: analog prototype poles at the
/// pre-warped cutoff, mapped through the bilinear transform.
pub fn butterworth_poles(order: usize, fc: f64, fs: f64) -> Vec<Complex64> {
    let n = order as f64;
    let fs2 = 2.0 * fs;
    let warped = fs2 * (PI * fc / fs).tan();
    (0..order)
        .map(|k| {
            let theta = PI * (2.0 * k as f64 + n + 1.0) / (2.0 * n);
            let s = Complex64::from_polar(warped, theta);
            (fs2 + s) / (fs2 - s)
        })
        .collect()
}

/// Digital Butterworth low-pass: analog prototype, frequency pre-warping and
/// the bilinear transform, scaled to unit gain at DC.
///
/// Stability is checked on the analytic poles rather than on the expanded
/// polynomial, whose roots are ill-conditioned for high orders.
pub fn design_butterworth_lowpass(
    order: usize,
    fc: f64,
    fs: f64,
) -> Result<IirCoefficients, DspError> {
    if order == 0 {
        return Err(DspError::InvalidOrder);
    }
    let nyquist = fs / 2.0;
    if !(fc > 0.0 && fc < nyquist) {
        return Err(DspError::CutoffOutOfRange { fc, nyquist });
    }
    let poles = butterworth_poles(order, fc, fs);
    if poles.iter().any(|p| !(p.norm() < 1.0)) {
        return Err(DspError::InvalidCoefficients(
            "poles on or outside the unit circle".into(),
        ));
    }
    let zeros = vec![Complex64::new(-1.0, 0.0); order];
    let a: Vec<f64> = poly_from_roots(&poles).iter().map(|c| c.re).collect();
    let b_unscaled: Vec<f64> = poly_from_roots(&zeros).iter().map(|c| c.re).collect();
    let gain = a.iter().sum::<f64>() / b_unscaled.iter().sum::<f64>();
    let b: Vec<f64> = b_unscaled.iter().map(|v| v * gain).collect();
    if b.iter().chain(&a).any(|v| !v.is_finite()) {
        return Err(DspError::InvalidCoefficients(
            "non-finite coefficient".into(),
        ));
    }
    Ok(IirCoefficients { b, a })
}
