use super::DspError;
use crate::data::{BreathSeries, RawTriaxialSeries, UniformSeries, UniformTriaxial};

/// Means over whole-second bins: output sample `k` is the mean of every input
/// sample with timestamp in `[start + k, start + k + 1)`, `start = floor(t[0])`.
/// Bins run up to the one containing the last sample.
pub fn resample_bin_mean(t: &[f64], values: &[f64]) -> Result<UniformSeries, DspError> {
    assert_eq!(
        t.len(),
        values.len(),
        "timestamps and values must have equal length"
    );
    if t.is_empty() {
        return Err(DspError::Empty);
    }
    let start = t[0].floor();
    let nbins = (t[t.len() - 1].floor() - start) as usize + 1;
    // bin boundaries as index ranges into the (sorted) input
    let mut bounds = vec![0usize; nbins + 1];
    for &ti in t {
        bounds[(ti.floor() - start) as usize + 1] += 1;
    }
    for k in 0..nbins {
        bounds[k + 1] += bounds[k];
    }
    let mut out = Vec::with_capacity(nbins);
    for k in 0..nbins {
        let bin = &values[bounds[k]..bounds[k + 1]];
        if bin.is_empty() {
            return Err(DspError::EmptyBin {
                second: start + k as f64,
            });
        }
        out.push(two_pass_mean(bin));
    }
    Ok(UniformSeries::new(start, 1.0, out))
}

/// Sum-then-divide mean refined by the mean residual; exact for constant bins.
fn two_pass_mean(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    m + v.iter().map(|x| x - m).sum::<f64>() / n
}

pub fn resample_triaxial(raw: &RawTriaxialSeries) -> Result<UniformTriaxial, DspError> {
    let t = raw.timestamps();
    let [x, y, z] = raw.axes().map(|axis| resample_bin_mean(t, axis));
    let (x, y, z) = (x?, y?, z?);
    Ok(
        UniformTriaxial::new(x.start, 1.0, x.values, y.values, z.values)
            .expect("bins are shared across axes"),
    )
}

/// Breath series interpolated onto whole seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct BreathGrid {
    pub vo2: UniformSeries,
    pub vco2: UniformSeries,
    pub labels: Vec<String>,
}

/// Linear interpolation onto the integer seconds from `ceil(t_first)` to
/// `floor(t_last)`. Each second takes the label of the nearest breath
/// (earlier breath on ties).
pub fn interp_to_1hz(b: &BreathSeries) -> Result<BreathGrid, DspError> {
    if b.len() < 2 {
        return Err(DspError::TooFewBreaths(b.len()));
    }
    let t = b.timestamps();
    let first = t[0].ceil();
    let last = t[t.len() - 1].floor();
    if last < first {
        return Err(DspError::TooFewBreaths(b.len()));
    }
    let n = (last - first) as usize + 1;
    let mut vo2 = Vec::with_capacity(n);
    let mut vco2 = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    let mut j = 0;
    for k in 0..n {
        let s = first + k as f64;
        while j + 2 < t.len() && t[j + 1] <= s {
            j += 1;
        }
        let (t0, t1) = (t[j], t[j + 1]);
        let w = (s - t0) / (t1 - t0);
        vo2.push(b.vo2()[j] + w * (b.vo2()[j + 1] - b.vo2()[j]));
        vco2.push(b.vco2()[j] + w * (b.vco2()[j + 1] - b.vco2()[j]));
        let nearest = if s - t0 <= t1 - s { j } else { j + 1 };
        labels.push(b.labels()[nearest].clone());
    }
    Ok(BreathGrid {
        vo2: UniformSeries::new(first, 1.0, vo2),
        vco2: UniformSeries::new(first, 1.0, vco2),
        labels,
    })
}
