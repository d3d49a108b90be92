use nalgebra::{DMatrix, DVector};

use super::{DspError, IirCoefficients};

/// Coefficients zero-padded to a common length.
fn padded(coef: &IirCoefficients) -> (Vec<f64>, Vec<f64>) {
    let n = coef.a().len().max(coef.b().len());
    let mut b = coef.b().to_vec();
    let mut a = coef.a().to_vec();
    b.resize(n, 0.0);
    a.resize(n, 0.0);
    (b, a)
}

/// Direct-form II transposed filtering with initial state `zi`
/// (length `max(len a, len b) - 1`).
pub fn lfilter(coef: &IirCoefficients, x: &[f64], zi: &[f64]) -> Vec<f64> {
    let (b, a) = padded(coef);
    let order = b.len() - 1;
    assert_eq!(
        zi.len(),
        order,
        "initial state length must equal the filter order"
    );
    let mut z = zi.to_vec();
    let mut y = Vec::with_capacity(x.len());
    for &xn in x {
        let yn = b[0] * xn + z.first().copied().unwrap_or(0.0);
        for i in 0..order {
            let next = if i + 1 < order { z[i + 1] } else { 0.0 };
            z[i] = b[i + 1] * xn + next - a[i + 1] * yn;
        }
        y.push(yn);
    }
    y
}

/// Steady-state filter state for a unit step input.
pub fn lfilter_zi(coef: &IirCoefficients) -> Vec<f64> {
    let (b, a) = padded(coef);
    let order = b.len() - 1;
    if order == 0 {
        return Vec::new();
    }
    // (I - C^T) zi = b[1:] - a[1:] b[0], C the companion matrix of a.
    let mut m = DMatrix::<f64>::identity(order, order);
    for i in 0..order {
        m[(i, 0)] += a[i + 1];
    }
    for i in 0..order - 1 {
        m[(i, i + 1)] -= 1.0;
    }
    let rhs = DVector::from_iterator(order, (0..order).map(|i| b[i + 1] - a[i + 1] * b[0]));
    m.lu()
        .solve(&rhs)
        .expect("stable filters have a non-singular steady-state system")
        .iter()
        .copied()
        .collect()
}

/// Zero-phase forward-backward filtering.
///
/// The signal is extended at both ends by odd reflection
/// (`2 x[0] - x[k]`) over `3 * (max(len a, len b) - 1)` samples and each pass
/// starts from the steady-state response to its first sample.
pub fn filtfilt(coef: &IirCoefficients, x: &[f64]) -> Result<Vec<f64>, DspError> {
    let ntaps = coef.a().len().max(coef.b().len());
    let padlen = 3 * (ntaps - 1);
    if x.len() <= padlen {
        return Err(DspError::SignalTooShort {
            needed: padlen,
            got: x.len(),
        });
    }
    let n = x.len();
    let (first, last) = (x[0], x[n - 1]);
    let mut ext = Vec::with_capacity(n + 2 * padlen);
    ext.extend((1..=padlen).rev().map(|k| 2.0 * first - x[k]));
    ext.extend_from_slice(x);
    ext.extend((1..=padlen).map(|k| 2.0 * last - x[n - 1 - k]));

    let zi = lfilter_zi(coef);
    let scaled = |v: f64| zi.iter().map(|z| z * v).collect::<Vec<f64>>();

    let forward = lfilter(coef, &ext, &scaled(ext[0]));
    let mut rev: Vec<f64> = forward.into_iter().rev().collect();
    let start = rev[0];
    rev = lfilter(coef, &rev, &scaled(start));
    rev.reverse();
    Ok(rev[padlen..padlen + n].to_vec())
}
