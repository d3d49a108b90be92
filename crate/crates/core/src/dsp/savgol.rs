use nalgebra::DMatrix;

use super::DspError;
use crate::data::UniformSeries;

/// Weights that evaluate the least-squares polynomial of degree `polyorder`,
/// fitted over a symmetric window, at the window centre.
pub fn savgol_coefficients(window: usize, polyorder: usize) -> Result<Vec<f64>, DspError> {
    if window % 2 == 0 || polyorder >= window {
        return Err(DspError::BadWindow { window, polyorder });
    }
    let half = (window / 2) as f64;
    // Offsets scaled to [-1, 1] keep the normal equations well conditioned;
    // the value at the centre does not depend on the scaling.
    let scale = if half > 0.0 { half } else { 1.0 };
    let vander = DMatrix::from_fn(window, polyorder + 1, |r, c| {
        ((r as f64 - half) / scale).powi(c as i32)
    });
    let gram = vander.transpose() * &vander;
    let inv = gram
        .try_inverse()
        .ok_or(DspError::BadWindow { window, polyorder })?;
    let proj = inv * vander.transpose();
    Ok(proj.row(0).iter().copied().collect())
}

/// Savitzky-Golay smoothing with mirror padding (`x[-k] = x[k]`,
/// `x[n-1+k] = x[n-1-k]`) at both ends.
pub fn savgol_smooth(
    x: &UniformSeries,
    window: usize,
    polyorder: usize,
) -> Result<UniformSeries, DspError> {
    let coef = savgol_coefficients(window, polyorder)?;
    let n = x.len();
    if n < window {
        return Err(DspError::SignalTooShort {
            needed: window - 1,
            got: n,
        });
    }
    let half = window / 2;
    let v = &x.values;
    let at = |i: isize| -> f64 {
        let idx = if i < 0 {
            (-i) as usize
        } else if i as usize >= n {
            2 * (n - 1) - i as usize
        } else {
            i as usize
        };
        v[idx]
    };
    let out = (0..n)
        .map(|i| {
            coef.iter()
                .enumerate()
                .map(|(j, c)| c * at(i as isize + j as isize - half as isize))
                .sum()
        })
        .collect();
    Ok(UniformSeries::new(x.start, x.rate, out))
}
