//! Domain types for one recording session and the on-disk dataset layout.
//!
//! A dataset is a directory of subject directories. Each subject directory
//! holds `meta.csv`, one `acc_<location>.csv` per sensor, `rest.csv` (the
//! supine rest breaths) and `adl.csv` (the activity session breaths). All
//! timestamps are seconds on a shared session clock.

mod align;
mod csv_io;
mod dataset;

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

pub use align::{align_overlap, common_span, GridSeries, Span};
pub use csv_io::{
    parse_acc_csv, parse_breath_csv, parse_meta_csv, write_acc_csv, write_breath_csv,
    write_meta_csv, ACC_HEADER, BREATH_HEADER, META_HEADER,
};
pub use dataset::{load_dataset, load_subject, subject_file_names, MIN_REST_SECONDS};

/// Nominal accelerometer sampling rate.
pub const NOMINAL_ACC_RATE_HZ: f64 = 30.0;
const ACC_RATE_TOLERANCE: f64 = 0.10;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("input is empty")]
    EmptyFile,
    #[error("unexpected header: expected `{expected}`, found `{found}`")]
    BadHeader { expected: String, found: String },
    #[error("malformed row at line {line}: {reason}")]
    MalformedRow { line: u64, reason: String },
    #[error("timestamps not strictly increasing at row {index}")]
    NonMonotoneTimestamps { index: usize },
    #[error("negative gas flow at row {index}")]
    NegativeGasFlow { index: usize },
    #[error("column lengths differ")]
    LengthMismatch,
    #[error("sampling rate {rate:.3} Hz outside 30 Hz +/- 10%")]
    RateOutOfRange { rate: f64 },
    #[error("invalid subject metadata: {0}")]
    InvalidMeta(String),
    #[error("missing file {}", .0.display())]
    MissingFile(PathBuf),
    #[error("duplicate subject id `{0}`")]
    DuplicateSubjectId(String),
    #[error("subject `{subject}`: rest lasts {duration:.1} s, at least 1800 s required")]
    ShortRest { subject: String, duration: f64 },
    #[error("series spans do not overlap")]
    NoOverlap,
    #[error("series must be sampled at 1 Hz, found {0} Hz")]
    NotOneHertz(f64),
    #[error("series grids are offset by a fraction of a sample")]
    Misaligned,
    #[error("{}: {source}", path.display())]
    InFile {
        path: PathBuf,
        #[source]
        source: Box<DataError>,
    },
    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sex {
    F,
    M,
}

impl FromStr for Sex {
    type Err = DataError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "F" => Ok(Sex::F),
            "M" => Ok(Sex::M),
            other => Err(DataError::InvalidMeta(format!("unknown sex `{other}`"))),
        }
    }
}

impl fmt::Display for Sex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sex::F => "F",
            Sex::M => "M",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubjectMeta {
    pub id: String,
    pub sex: Sex,
    pub age: u32,
    pub height_cm: f64,
    pub mass_kg: f64,
}

impl SubjectMeta {
    pub fn new(
        id: impl Into<String>,
        sex: Sex,
        age: u32,
        height_cm: f64,
        mass_kg: f64,
    ) -> Result<Self, DataError> {
        let id = id.into();
        if id.is_empty() || id.contains(',') {
            return Err(DataError::InvalidMeta(format!("bad subject id `{id}`")));
        }
        if !(height_cm.is_finite() && height_cm > 0.0) {
            return Err(DataError::InvalidMeta(format!("height {height_cm} cm")));
        }
        if !(mass_kg.is_finite() && mass_kg > 0.0) {
            return Err(DataError::InvalidMeta(format!("mass {mass_kg} kg")));
        }
        let meta = SubjectMeta {
            id,
            sex,
            age,
            height_cm,
            mass_kg,
        };
        if meta.bmi() >= 40.0 {
            log::warn!(
                "subject {}: BMI {:.1} is outside the inclusion range (< 40)",
                meta.id,
                meta.bmi()
            );
        }
        Ok(meta)
    }

    pub fn bmi(&self) -> f64 {
        let h = self.height_cm / 100.0;
        self.mass_kg / (h * h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SensorLocation {
    Pelvis,
    LeftThigh,
    RightThigh,
    LeftWrist,
    RightWrist,
}

impl SensorLocation {
    pub const ALL: [SensorLocation; 5] = [
        SensorLocation::Pelvis,
        SensorLocation::LeftThigh,
        SensorLocation::RightThigh,
        SensorLocation::LeftWrist,
        SensorLocation::RightWrist,
    ];

    /// Name used in file names (`acc_<name>.csv`).
    pub fn as_str(self) -> &'static str {
        match self {
            SensorLocation::Pelvis => "pelvis",
            SensorLocation::LeftThigh => "left_thigh",
            SensorLocation::RightThigh => "right_thigh",
            SensorLocation::LeftWrist => "left_wrist",
            SensorLocation::RightWrist => "right_wrist",
        }
    }

    pub fn is_wrist(self) -> bool {
        matches!(self, SensorLocation::LeftWrist | SensorLocation::RightWrist)
    }
}

impl fmt::Display for SensorLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SensorLocation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SensorLocation::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| format!("unknown sensor location `{s}`"))
    }
}

fn check_increasing(t: &[f64]) -> Result<(), DataError> {
    for (i, w) in t.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(DataError::NonMonotoneTimestamps { index: i + 1 });
        }
    }
    Ok(())
}

/// Raw accelerometer samples in m/s², one row per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTriaxialSeries {
    t: Vec<f64>,
    ax: Vec<f64>,
    ay: Vec<f64>,
    az: Vec<f64>,
}

impl RawTriaxialSeries {
    pub fn new(t: Vec<f64>, ax: Vec<f64>, ay: Vec<f64>, az: Vec<f64>) -> Result<Self, DataError> {
        if t.is_empty() {
            return Err(DataError::EmptyFile);
        }
        if ax.len() != t.len() || ay.len() != t.len() || az.len() != t.len() {
            return Err(DataError::LengthMismatch);
        }
        check_increasing(&t)?;
        let series = RawTriaxialSeries { t, ax, ay, az };
        if let Some(rate) = series.nominal_rate() {
            let lo = NOMINAL_ACC_RATE_HZ * (1.0 - ACC_RATE_TOLERANCE);
            let hi = NOMINAL_ACC_RATE_HZ * (1.0 + ACC_RATE_TOLERANCE);
            if !(lo..=hi).contains(&rate) {
                return Err(DataError::RateOutOfRange { rate });
            }
        }
        Ok(series)
    }

    /// Builds a series from already-validated parts without the rate check.
    pub(crate) fn from_parts_unchecked(
        t: Vec<f64>,
        ax: Vec<f64>,
        ay: Vec<f64>,
        az: Vec<f64>,
    ) -> Self {
        RawTriaxialSeries { t, ax, ay, az }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn timestamps(&self) -> &[f64] {
        &self.t
    }

    pub fn axes(&self) -> [&[f64]; 3] {
        [&self.ax, &self.ay, &self.az]
    }

    /// Mean sampling rate over the whole record; `None` for a single sample.
    pub fn nominal_rate(&self) -> Option<f64> {
        let n = self.t.len();
        if n < 2 {
            return None;
        }
        Some((n - 1) as f64 / (self.t[n - 1] - self.t[0]))
    }
}

/// Breath-by-breath gas exchange, one row per breath.
#[derive(Debug, Clone, PartialEq)]
pub struct BreathSeries {
    t: Vec<f64>,
    vo2: Vec<f64>,
    vco2: Vec<f64>,
    labels: Vec<String>,
}

impl BreathSeries {
    pub fn new(
        t: Vec<f64>,
        vo2: Vec<f64>,
        vco2: Vec<f64>,
        labels: Vec<String>,
    ) -> Result<Self, DataError> {
        if t.is_empty() {
            return Err(DataError::EmptyFile);
        }
        if vo2.len() != t.len() || vco2.len() != t.len() || labels.len() != t.len() {
            return Err(DataError::LengthMismatch);
        }
        check_increasing(&t)?;
        if let Some(index) = vo2
            .iter()
            .zip(&vco2)
            .position(|(&o, &c)| !(o >= 0.0) || !(c >= 0.0))
        {
            return Err(DataError::NegativeGasFlow { index });
        }
        Ok(BreathSeries {
            t,
            vo2,
            vco2,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn timestamps(&self) -> &[f64] {
        &self.t
    }

    pub fn vo2(&self) -> &[f64] {
        &self.vo2
    }

    pub fn vco2(&self) -> &[f64] {
        &self.vco2
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn duration(&self) -> f64 {
        self.t[self.t.len() - 1] - self.t[0]
    }
}

/// Scalar series on a regular grid: sample `k` sits at `start + k / rate`.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformSeries {
    pub start: f64,
    pub rate: f64,
    pub values: Vec<f64>,
}

impl UniformSeries {
    pub fn new(start: f64, rate: f64, values: Vec<f64>) -> Self {
        assert!(rate > 0.0, "sampling rate must be positive");
        UniformSeries {
            start,
            rate,
            values,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time_at(&self, k: usize) -> f64 {
        self.start + k as f64 / self.rate
    }
}

/// Three equally long channels on a shared regular grid.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformTriaxial {
    pub start: f64,
    pub rate: f64,
    channels: [Vec<f64>; 3],
}

impl UniformTriaxial {
    pub fn new(
        start: f64,
        rate: f64,
        x: Vec<f64>,
        y: Vec<f64>,
        z: Vec<f64>,
    ) -> Result<Self, DataError> {
        assert!(rate > 0.0, "sampling rate must be positive");
        if x.len() != y.len() || x.len() != z.len() {
            return Err(DataError::LengthMismatch);
        }
        Ok(UniformTriaxial {
            start,
            rate,
            channels: [x, y, z],
        })
    }

    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels[0].is_empty()
    }

    pub fn channels(&self) -> &[Vec<f64>; 3] {
        &self.channels
    }

    pub fn channel(&self, axis: usize) -> &[f64] {
        &self.channels[axis]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubjectRecord {
    pub meta: SubjectMeta,
    pub acc: BTreeMap<SensorLocation, RawTriaxialSeries>,
    pub rest: BreathSeries,
    pub adl: BreathSeries,
}

impl SubjectRecord {
    pub fn new(
        meta: SubjectMeta,
        acc: BTreeMap<SensorLocation, RawTriaxialSeries>,
        rest: BreathSeries,
        adl: BreathSeries,
    ) -> Result<Self, DataError> {
        if let Some(missing) = SensorLocation::ALL.iter().find(|l| !acc.contains_key(l)) {
            return Err(DataError::MissingFile(PathBuf::from(format!(
                "{}/acc_{}.csv",
                meta.id, missing
            ))));
        }
        if rest.duration() < MIN_REST_SECONDS {
            return Err(DataError::ShortRest {
                subject: meta.id.clone(),
                duration: rest.duration(),
            });
        }
        Ok(SubjectRecord {
            meta,
            acc,
            rest,
            adl,
        })
    }

    pub fn id(&self) -> &str {
        &self.meta.id
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    subjects: Vec<SubjectRecord>,
}

impl Dataset {
    /// Sorts subjects by id and rejects duplicate ids.
    pub fn new(mut subjects: Vec<SubjectRecord>) -> Result<Self, DataError> {
        subjects.sort_by(|a, b| a.meta.id.cmp(&b.meta.id));
        for w in subjects.windows(2) {
            if w[0].meta.id == w[1].meta.id {
                return Err(DataError::DuplicateSubjectId(w[0].meta.id.clone()));
            }
        }
        Ok(Dataset { subjects })
    }

    pub fn subjects(&self) -> &[SubjectRecord] {
        &self.subjects
    }

    pub fn len(&self) -> usize {
        self.subjects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subjects.is_empty()
    }
}
