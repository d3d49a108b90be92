//! Signal processing primitives for the preprocessing chain.
//!
//! All routines work in `f64` and are pure functions of their inputs.

mod butterworth;
mod filtfilt;
mod gravity;
mod resample;
mod savgol;

use thiserror::Error;

pub use butterworth::{butterworth_poles, design_butterworth_lowpass, IirCoefficients};
pub use filtfilt::{filtfilt, lfilter, lfilter_zi};
pub use gravity::{remove_gravity, GRAVITY_CUTOFF_HZ, GRAVITY_FILTER_ORDER};
pub use resample::{interp_to_1hz, resample_bin_mean, resample_triaxial, BreathGrid};
pub use savgol::{savgol_coefficients, savgol_smooth};

#[derive(Debug, Error, PartialEq)]
pub enum DspError {
    #[error("cutoff {fc} Hz must lie strictly between 0 and fs/2 = {nyquist} Hz")]
    CutoffOutOfRange { fc: f64, nyquist: f64 },
    #[error("filter order must be at least 1")]
    InvalidOrder,
    #[error("invalid coefficients: {0}")]
    InvalidCoefficients(String),
    #[error("signal has {got} samples, more than {needed} required")]
    SignalTooShort { needed: usize, got: usize },
    #[error("no samples fall in the 1 s bin starting at {second} s")]
    EmptyBin { second: f64 },
    #[error("at least two breaths are required, got {0}")]
    TooFewBreaths(usize),
    #[error("invalid Savitzky-Golay window {window} for polynomial order {polyorder}")]
    BadWindow { window: usize, polyorder: usize },
    #[error("input is empty")]
    Empty,
}
