//! Sliding-window construction and the integrated-absolute-acceleration feature.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::data::{SensorLocation, UniformTriaxial};
use crate::energetics::PaeeSeries;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FeatureError {
    #[error("series of {got} samples is too short for window {width} + horizon {horizon}")]
    SeriesTooShort {
        got: usize,
        width: usize,
        horizon: usize,
    },
    #[error("composition requires missing sensor {0}")]
    MissingSensor(SensorLocation),
    #[error("acceleration and PAEE series are not on the same grid")]
    Misaligned,
    #[error("window width, step and horizon must be positive")]
    InvalidSpec,
}

/// Borrowed three-axis window.
#[derive(Debug, Clone, Copy)]
pub struct TriaxialWindow<'a> {
    pub x: &'a [f64],
    pub y: &'a [f64],
    pub z: &'a [f64],
}

impl TriaxialWindow<'_> {
    /// Sum of absolute values over all samples of all three axes.
    pub fn iaa_tot(&self) -> f64 {
        iaa_tot(self.x, self.y, self.z)
    }
}

pub fn iaa_tot(x: &[f64], y: &[f64], z: &[f64]) -> f64 {
    let sum_abs = |a: &[f64]| a.iter().map(|v| v.abs()).sum::<f64>();
    sum_abs(x) + sum_abs(y) + sum_abs(z)
}

/// The four sensor sets compared in the experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Composition {
    PelvisAcc,
    ThreeAcc,
    LeftWristAcc,
    RightWristAcc,
}

impl Composition {
    pub const ALL: [Composition; 4] = [
        Composition::PelvisAcc,
        Composition::ThreeAcc,
        Composition::LeftWristAcc,
        Composition::RightWristAcc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Composition::PelvisAcc => "pelvis-acc",
            Composition::ThreeAcc => "3-acc",
            Composition::LeftWristAcc => "l-wrist-acc",
            Composition::RightWristAcc => "r-wrist-acc",
        }
    }

    /// Sensors in channel-concatenation order.
    pub fn sensors(self) -> &'static [SensorLocation] {
        use SensorLocation::*;
        match self {
            Composition::PelvisAcc => &[Pelvis],
            Composition::ThreeAcc => &[Pelvis, LeftThigh, RightThigh],
            Composition::LeftWristAcc => &[LeftWrist],
            Composition::RightWristAcc => &[RightWrist],
        }
    }

    pub fn channels(self) -> usize {
        3 * self.sensors().len()
    }

    pub fn is_com(self) -> bool {
        matches!(self, Composition::PelvisAcc | Composition::ThreeAcc)
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Composition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Composition::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown composition `{s}`"))
    }
}

/// Window geometry in samples of the 1 Hz grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowSpec {
    pub width: usize,
    pub step: usize,
    pub horizon: usize,
}

impl Default for WindowSpec {
    fn default() -> Self {
        WindowSpec {
            width: 30,
            step: 1,
            horizon: 1,
        }
    }
}

impl WindowSpec {
    /// Number of windows over a series of `n` samples.
    pub fn count(&self, n: usize) -> usize {
        if n < self.width + self.horizon {
            0
        } else {
            (n - self.width - self.horizon) / self.step + 1
        }
    }
}

/// One training or evaluation sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SupervisedWindow {
    /// `channels × width`, channel-major.
    pub tensor: Vec<f64>,
    pub channels: usize,
    pub width: usize,
    /// One IAA_tot per sensor, in composition order.
    pub iaa: Vec<f64>,
    /// PAEE (W/kg) `horizon` samples after the last window sample.
    pub target: f64,
    pub subject: String,
    /// Time of the target sample.
    pub target_time: f64,
}

impl SupervisedWindow {
    pub fn channel(&self, c: usize) -> &[f64] {
        &self.tensor[c * self.width..(c + 1) * self.width]
    }
}

/// Cuts aligned 1 Hz series into supervised windows. Window `k` covers
/// samples `[k*step, k*step + width)` and its target is PAEE sample
/// `k*step + width + horizon - 1`.
pub fn build_supervised_windows(
    acc: &BTreeMap<SensorLocation, UniformTriaxial>,
    paee: &PaeeSeries,
    comp: Composition,
    spec: WindowSpec,
    subject: &str,
) -> Result<Vec<SupervisedWindow>, FeatureError> {
    if spec.width == 0 || spec.step == 0 || spec.horizon == 0 {
        return Err(FeatureError::InvalidSpec);
    }
    let series = comp
        .sensors()
        .iter()
        .map(|loc| acc.get(loc).ok_or(FeatureError::MissingSensor(*loc)))
        .collect::<Result<Vec<_>, _>>()?;
    let grid = paee.series();
    for s in &series {
        if s.len() != grid.len() || s.start != grid.start || s.rate != grid.rate {
            return Err(FeatureError::Misaligned);
        }
    }
    let n = grid.len();
    if n < spec.width + spec.horizon {
        return Err(FeatureError::SeriesTooShort {
            got: n,
            width: spec.width,
            horizon: spec.horizon,
        });
    }
    let channels = comp.channels();
    let windows = (0..spec.count(n))
        .map(|k| {
            let lo = k * spec.step;
            let hi = lo + spec.width;
            let mut tensor = Vec::with_capacity(channels * spec.width);
            let mut iaa = Vec::with_capacity(series.len());
            for s in &series {
                let [x, y, z] = s.channels();
                iaa.push(iaa_tot(&x[lo..hi], &y[lo..hi], &z[lo..hi]));
                for ch in s.channels() {
                    tensor.extend_from_slice(&ch[lo..hi]);
                }
            }
            let target_idx = hi + spec.horizon - 1;
            SupervisedWindow {
                tensor,
                channels,
                width: spec.width,
                iaa,
                target: grid.values[target_idx],
                subject: subject.to_string(),
                target_time: grid.time_at(target_idx),
            }
        })
        .collect();
    Ok(windows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::UniformSeries;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn iaa_examples() {
        let zero = [0.0; 30];
        assert_eq!(iaa_tot(&zero, &zero, &zero), 0.0);
        let one = [1.0; 30];
        assert_eq!(
            TriaxialWindow {
                x: &one,
                y: &one,
                z: &one
            }
            .iaa_tot(),
            90.0
        );
    }

    #[test]
    fn iaa_matches_triple_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let w: [[f64; 30]; 3] =
            std::array::from_fn(|_| std::array::from_fn(|_| rng.gen_range(-8.0..8.0)));
        let mut brute = 0.0;
        for axis in &w {
            for v in axis {
                brute += v.abs();
            }
        }
        assert!((iaa_tot(&w[0], &w[1], &w[2]) - brute).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn iaa_sign_and_scale(v in prop::collection::vec(-50.0f64..50.0, 90), alpha in -10.0f64..10.0) {
            let (x, rest) = v.split_at(30);
            let (y, z) = rest.split_at(30);
            let base = iaa_tot(x, y, z);
            prop_assert!(base >= 0.0);
            let neg = |a: &[f64]| a.iter().map(|v| -v).collect::<Vec<_>>();
            prop_assert_eq!(iaa_tot(&neg(x), &neg(y), &neg(z)), base);
            let sc = |a: &[f64]| a.iter().map(|v| alpha * v).collect::<Vec<_>>();
            let scaled = iaa_tot(&sc(x), &sc(y), &sc(z));
            prop_assert!((scaled - alpha.abs() * base).abs() <= 1e-9 * (1.0 + scaled.abs()));
        }

        #[test]
        fn window_count_formula(n in 31usize..400) {
            let (acc, paee) = fixture(n, 1);
            let w = build_supervised_windows(&acc, &paee, Composition::PelvisAcc, WindowSpec::default(), "S").unwrap();
            prop_assert_eq!(w.len(), n - 30 - 1 + 1);
        }
    }

    fn fixture(n: usize, seed: u64) -> (BTreeMap<SensorLocation, UniformTriaxial>, PaeeSeries) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut acc = BTreeMap::new();
        for loc in SensorLocation::ALL {
            let mut ch = || {
                (0..n)
                    .map(|_| rng.gen_range(-3.0..3.0))
                    .collect::<Vec<f64>>()
            };
            let (x, y, z) = (ch(), ch(), ch());
            acc.insert(loc, UniformTriaxial::new(500.0, 1.0, x, y, z).unwrap());
        }
        let paee = PaeeSeries(UniformSeries::new(
            500.0,
            1.0,
            (0..n).map(|_| rng.gen_range(0.0..6.0)).collect(),
        ));
        (acc, paee)
    }

    #[test]
    fn boundary_counts() {
        let (acc, paee) = fixture(31, 2);
        let w = build_supervised_windows(
            &acc,
            &paee,
            Composition::PelvisAcc,
            WindowSpec::default(),
            "S",
        )
        .unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].target, paee.values()[30]);
        assert_eq!(w[0].target_time, 530.0);
        let (acc, paee) = fixture(330, 2);
        let w = build_supervised_windows(
            &acc,
            &paee,
            Composition::ThreeAcc,
            WindowSpec::default(),
            "S",
        )
        .unwrap();
        assert_eq!(w.len(), 300);
        let (acc, paee) = fixture(30, 2);
        assert!(matches!(
            build_supervised_windows(
                &acc,
                &paee,
                Composition::PelvisAcc,
                WindowSpec::default(),
                "S"
            ),
            Err(FeatureError::SeriesTooShort { got: 30, .. })
        ));
    }

    #[test]
    fn windows_match_brute_force_slicer() {
        let (acc, paee) = fixture(120, 4);
        let comp = Composition::ThreeAcc;
        let w = build_supervised_windows(&acc, &paee, comp, WindowSpec::default(), "S07").unwrap();
        for (k, win) in w.iter().enumerate() {
            assert_eq!(win.channels, 9);
            assert_eq!(win.subject, "S07");
            assert_eq!(win.target, paee.values()[k + 30]);
            for (s, loc) in comp.sensors().iter().enumerate() {
                let src = &acc[loc];
                let mut iaa = 0.0;
                for axis in 0..3 {
                    for i in 0..30 {
                        let v = src.channel(axis)[k + i];
                        assert_eq!(win.tensor[(3 * s + axis) * 30 + i], v);
                        iaa += v.abs();
                    }
                }
                assert!((win.iaa[s] - iaa).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn missing_sensor_and_misalignment() {
        let (mut acc, paee) = fixture(60, 5);
        acc.remove(&SensorLocation::LeftThigh);
        assert_eq!(
            build_supervised_windows(
                &acc,
                &paee,
                Composition::ThreeAcc,
                WindowSpec::default(),
                "S"
            ),
            Err(FeatureError::MissingSensor(SensorLocation::LeftThigh))
        );
        let shifted = PaeeSeries(UniformSeries::new(501.0, 1.0, paee.values().to_vec()));
        assert_eq!(
            build_supervised_windows(
                &acc,
                &shifted,
                Composition::PelvisAcc,
                WindowSpec::default(),
                "S"
            ),
            Err(FeatureError::Misaligned)
        );
    }

    #[test]
    fn composition_names() {
        for c in Composition::ALL {
            assert_eq!(c.name().parse::<Composition>().unwrap(), c);
        }
        assert_eq!(Composition::ThreeAcc.channels(), 9);
        assert_eq!(
            Composition::RightWristAcc.sensors(),
            &[SensorLocation::RightWrist]
        );
    }
}
