//! Shapiro-Wilk W test with Royston's AS R94 coefficient and p-value
//! approximations.

use statrs::distribution::{ContinuousCDF, Normal};

use super::{StatsError, TestResult};

const C1: [f64; 6] = [0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056];
const C2: [f64; 6] = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633];
const C3: [f64; 4] = [0.544, -0.39978, 0.025054, -6.714e-4];
const C4: [f64; 4] = [1.3822, -0.77857, 0.062767, -0.0020322];
const C5: [f64; 4] = [-1.5861, -0.31082, -0.083751, 0.0038915];
const C6: [f64; 3] = [-0.4803, -0.082676, 0.0030302];
const G: [f64; 2] = [-2.273, 0.459];

pub const SW_MIN_N: usize = 3;
pub const SW_MAX_N: usize = 50;

fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, ci| acc * x + ci)
}

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal")
}

/// Antisymmetric coefficients `a_1..a_{n/2}` (largest first), normalized so
/// that the full coefficient vector has unit length.
pub fn sw_coefficients(n: usize) -> Vec<f64> {
    let nn2 = n / 2;
    if n == 3 {
        return vec![std::f64::consts::FRAC_1_SQRT_2];
    }
    let norm = std_normal();
    let an25 = n as f64 + 0.25;
    // m_i are the (negative) expected normal order statistics of the lower half
    let m: Vec<f64> = (1..=nn2)
        .map(|i| norm.inverse_cdf((i as f64 - 0.375) / an25))
        .collect();
    let summ2 = 2.0 * m.iter().map(|v| v * v).sum::<f64>();
    let ssumm2 = summ2.sqrt();
    let rsn = 1.0 / (n as f64).sqrt();
    let a1 = poly(&C1, rsn) - m[0] / ssumm2;
    let mut a = vec![0.0; nn2];
    a[0] = a1;
    let (first, fac) = if n > 5 {
        let a2 = -m[1] / ssumm2 + poly(&C2, rsn);
        a[1] = a2;
        let fac = ((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1])
            / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2))
            .sqrt();
        (2, fac)
    } else {
        let fac = ((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1)).sqrt();
        (1, fac)
    };
    for i in first..nn2 {
        a[i] = -m[i] / fac;
    }
    a
}

/// Returns `TestResult { statistic: W, df: n, p }`.
pub fn shapiro_wilk(x: &[f64]) -> Result<TestResult, StatsError> {
    let n = x.len();
    if !(SW_MIN_N..=SW_MAX_N).contains(&n) {
        return Err(StatsError::SampleSizeOutOfRange {
            n,
            min: SW_MIN_N,
            max: SW_MAX_N,
        });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(StatsError::Domain("non-finite observation".into()));
    }
    let mut s = x.to_vec();
    s.sort_by(f64::total_cmp);
    let range = s[n - 1] - s[0];
    if range == 0.0 {
        return Err(StatsError::ConstantSample);
    }
    // scale by the range as AS R94 does, which keeps W invariant
    let s: Vec<f64> = s.iter().map(|v| (v - s[0]) / range).collect();
    let mean = s.iter().sum::<f64>() / n as f64;
    let ss: f64 = s.iter().map(|v| (v - mean) * (v - mean)).sum();
    let a = sw_coefficients(n);
    let num: f64 = a
        .iter()
        .enumerate()
        .map(|(i, ai)| ai * (s[n - 1 - i] - s[i]))
        .sum();
    let w = (num * num / ss).min(1.0);
    Ok(TestResult::with_df1(w, n as f64, sw_p_value(w, n)))
}

fn sw_p_value(w: f64, n: usize) -> f64 {
    let an = n as f64;
    if n == 3 {
        let pi6 = 6.0 / std::f64::consts::PI;
        let stqr = std::f64::consts::FRAC_PI_3;
        return (pi6 * (w.sqrt().asin() - stqr)).clamp(0.0, 1.0);
    }
    let w1 = 1.0 - w;
    if w1 <= 0.0 {
        return 1.0;
    }
    let mut y = w1.ln();
    let (m, s) = if n <= 11 {
        let gamma = poly(&G, an);
        if y >= gamma {
            return 1e-99;
        }
        y = -(gamma - y).ln();
        (poly(&C3, an), poly(&C4, an).exp())
    } else {
        let xx = an.ln();
        (poly(&C5, xx), poly(&C6, xx).exp())
    };
    let z = (y - m) / s;
    (1.0 - std_normal().cdf(z)).clamp(0.0, 1.0)
}
