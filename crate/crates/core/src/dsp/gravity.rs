use super::{design_butterworth_lowpass, filtfilt, DspError};
use crate::data::{RawTriaxialSeries, NOMINAL_ACC_RATE_HZ};

pub const GRAVITY_FILTER_ORDER: usize = 2;
pub const GRAVITY_CUTOFF_HZ: f64 = 0.25;

/// Subtracts a per-axis gravity estimate (zero-phase 0.25 Hz low-pass) from
/// each axis. Timestamps are kept as they are.
pub fn remove_gravity(raw: &RawTriaxialSeries) -> Result<RawTriaxialSeries, DspError> {
    let fs = raw.nominal_rate().unwrap_or(NOMINAL_ACC_RATE_HZ);
    let coef = design_butterworth_lowpass(GRAVITY_FILTER_ORDER, GRAVITY_CUTOFF_HZ, fs)?;
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(3);
    for axis in raw.axes() {
        let g = filtfilt(&coef, axis)?;
        out.push(axis.iter().zip(&g).map(|(a, g)| a - g).collect());
    }
    let az = out.pop().unwrap();
    let ay = out.pop().unwrap();
    let ax = out.pop().unwrap();
    Ok(RawTriaxialSeries::from_parts_unchecked(
        raw.timestamps().to_vec(),
        ax,
        ay,
        az,
    ))
}
