//! The per-subject chain from raw files to aligned 1 Hz model inputs:
//! acceleration is low-pass filtered, gravity-corrected and bin-averaged;
//! breath data is interpolated, smoothed and converted to PAEE.

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::data::{
    align_overlap, common_span, DataError, Dataset, GridSeries, RawTriaxialSeries, SensorLocation,
    SubjectRecord, UniformTriaxial, NOMINAL_ACC_RATE_HZ,
};
use crate::dsp::{
    design_butterworth_lowpass, filtfilt, interp_to_1hz, remove_gravity, resample_triaxial,
    savgol_smooth, DspError,
};
use crate::energetics::{
    derive_paee, estimate_rmr, EnergeticsError, PaeeSeries, RMR_DISCARD_SECONDS,
};

pub const ACC_LOWPASS_ORDER: usize = 4;
pub const ACC_LOWPASS_HZ: f64 = 6.0;
pub const SG_WINDOW: usize = 21;
pub const SG_POLYORDER: usize = 1;

#[derive(Debug, Error)]
pub enum PrepareError {
    #[error("subject {subject}: {source}")]
    Dsp { subject: String, source: DspError },
    #[error("subject {subject}: {source}")]
    Energetics {
        subject: String,
        source: EnergeticsError,
    },
    #[error("subject {subject}: {source}")]
    Data { subject: String, source: DataError },
}

/// One subject on the common 1 Hz grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedSubject {
    pub id: String,
    pub mass_kg: f64,
    pub acc: BTreeMap<SensorLocation, UniformTriaxial>,
    pub paee: PaeeSeries,
    /// Activity label per second, aligned with `paee`.
    pub labels: Vec<String>,
}

/// Contiguous run of one activity label on a 1 Hz grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub label: String,
    pub start_s: f64,
    pub end_s: f64,
}

impl PreparedSubject {
    /// Activity runs from the per-second labels.
    pub fn segments(&self) -> Vec<Segment> {
        let grid = self.paee.series();
        let mut out: Vec<Segment> = Vec::new();
        for (k, label) in self.labels.iter().enumerate() {
            let t = grid.time_at(k);
            match out.last_mut() {
                Some(s) if &s.label == label => s.end_s = t + 1.0,
                _ => out.push(Segment {
                    label: label.clone(),
                    start_s: t,
                    end_s: t + 1.0,
                }),
            }
        }
        out
    }
}

/// 6 Hz low-pass, gravity removal, then 1 Hz bin means.
pub fn prepare_acc(raw: &RawTriaxialSeries) -> Result<UniformTriaxial, DspError> {
    let fs = raw.nominal_rate().unwrap_or(NOMINAL_ACC_RATE_HZ);
    let coef = design_butterworth_lowpass(ACC_LOWPASS_ORDER, ACC_LOWPASS_HZ, fs)?;
    let [x, y, z] = raw.axes().map(|a| filtfilt(&coef, a));
    let filtered =
        RawTriaxialSeries::from_parts_unchecked(raw.timestamps().to_vec(), x?, y?, z?);
    resample_triaxial(&remove_gravity(&filtered)?)
}

/// PAEE at 1 Hz from the ADL breaths and the rest-period RMR, with the
/// per-second activity labels.
pub fn subject_paee(rec: &SubjectRecord) -> Result<(PaeeSeries, Vec<String>), PrepareError> {
    let subject = rec.id().to_string();
    let dsp = |source| PrepareError::Dsp {
        subject: subject.clone(),
        source,
    };
    let grid = interp_to_1hz(&rec.adl).map_err(dsp)?;
    let vo2 = savgol_smooth(&grid.vo2, SG_WINDOW, SG_POLYORDER).map_err(dsp)?;
    let vco2 = savgol_smooth(&grid.vco2, SG_WINDOW, SG_POLYORDER).map_err(dsp)?;
    let energetics = |source| PrepareError::Energetics {
        subject: subject.clone(),
        source,
    };
    let rmr = estimate_rmr(&rec.rest, RMR_DISCARD_SECONDS).map_err(energetics)?;
    let paee = derive_paee(&vo2, &vco2, rmr, rec.meta.mass_kg).map_err(energetics)?;
    Ok((paee, grid.labels))
}

pub fn prepare_subject(rec: &SubjectRecord) -> Result<PreparedSubject, PrepareError> {
    let subject = rec.id().to_string();
    let (paee, labels) = subject_paee(rec)?;
    let mut series = vec![GridSeries::Scalar(paee.0.clone())];
    for loc in SensorLocation::ALL {
        let raw = rec.acc.get(&loc).ok_or_else(|| PrepareError::Data {
            subject: subject.clone(),
            source: DataError::MissingFile(format!("acc_{loc}.csv").into()),
        })?;
        let acc = prepare_acc(raw).map_err(|source| PrepareError::Dsp {
            subject: subject.clone(),
            source,
        })?;
        series.push(GridSeries::Triaxial(acc));
    }
    let data = |source| PrepareError::Data {
        subject: subject.clone(),
        source,
    };
    let spans: Vec<_> = series.iter().map(GridSeries::span).collect();
    let (span, offsets) = common_span(&spans).map_err(data)?;
    let labels = labels[offsets[0]..offsets[0] + span.len].to_vec();
    let mut aligned = align_overlap(&series).map_err(data)?.into_iter();
    let paee = match aligned.next() {
        Some(GridSeries::Scalar(s)) => PaeeSeries(s),
        _ => unreachable!("first series is the scalar PAEE"),
    };
    let acc = SensorLocation::ALL
        .into_iter()
        .zip(aligned)
        .map(|(loc, s)| match s {
            GridSeries::Triaxial(t) => (loc, t),
            GridSeries::Scalar(_) => unreachable!("acceleration series are triaxial"),
        })
        .collect();
    Ok(PreparedSubject {
        id: subject,
        mass_kg: rec.meta.mass_kg,
        acc,
        paee,
        labels,
    })
}

/// Prepares every subject (concurrently); results keep dataset order.
pub fn prepare_dataset(ds: &Dataset) -> Vec<Result<PreparedSubject, PrepareError>> {
    ds.subjects().par_iter().map(prepare_subject).collect()
}
