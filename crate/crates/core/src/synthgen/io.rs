use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use super::config::GeneratorConfig;
use super::generate::{generate_subject, GeneratedSubject};
use super::protocol::ActivityDuration;
use super::SynthError;
use crate::data::{
    write_acc_csv, write_breath_csv, write_meta_csv, DataError, SensorLocation, UniformSeries,
};

pub const TRUTH_FILE: &str = "truth_paee.csv";
pub const TRUTH_HEADER: &str = "t_s,paee_wkg";
pub const MANIFEST_FILE: &str = "manifest.txt";

#[derive(Debug, Clone, PartialEq)]
pub struct SubjectSummary {
    pub id: String,
    pub order: Vec<String>,
    pub clamped: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSummary {
    pub subjects: Vec<SubjectSummary>,
}

impl DatasetSummary {
    pub fn clamped(&self) -> usize {
        self.subjects.iter().map(|s| s.clamped).sum()
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), SynthError> {
    fs::write(path, text).map_err(|source| SynthError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_truth_csv(truth: &UniformSeries) -> String {
    let mut out = String::with_capacity(truth.len() * 20 + 16);
    out.push_str(TRUTH_HEADER);
    out.push('\n');
    for (k, v) in truth.values.iter().enumerate() {
        let _ = writeln!(out, "{},{v}", truth.time_at(k));
    }
    out
}

/// Reads a truth sidecar; rows must sit on consecutive whole seconds.
pub fn parse_truth_csv(text: &str) -> Result<UniformSeries, DataError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == TRUTH_HEADER => {}
        Some(h) => {
            return Err(DataError::BadHeader {
                expected: TRUTH_HEADER.into(),
                found: h.into(),
            })
        }
        None => return Err(DataError::EmptyFile),
    }
    let mut start = None;
    let mut values = Vec::new();
    for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let bad = |reason: String| DataError::MalformedRow {
            line: i as u64 + 2,
            reason,
        };
        let (t, v) = line
            .split_once(',')
            .ok_or_else(|| bad("expected 2 fields".into()))?;
        let t: f64 = t.trim().parse().map_err(|e| bad(format!("{e}")))?;
        let v: f64 = v.trim().parse().map_err(|e| bad(format!("{e}")))?;
        let t0 = *start.get_or_insert(t);
        if t != t0 + values.len() as f64 {
            return Err(bad(format!("t_s {t} is not on the 1 s grid")));
        }
        values.push(v);
    }
    match start {
        Some(s) => Ok(UniformSeries::new(s, 1.0, values)),
        None => Err(DataError::EmptyFile),
    }
}

/// Writes the subject directory `dir` in the dataset layout plus the truth
/// sidecar.
pub fn write_subject(dir: &Path, s: &GeneratedSubject) -> Result<(), SynthError> {
    fs::create_dir_all(dir).map_err(|source| SynthError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let r = &s.record;
    write_file(&dir.join("meta.csv"), &write_meta_csv(&r.meta))?;
    for loc in SensorLocation::ALL {
        write_file(&dir.join(format!("acc_{loc}.csv")), &write_acc_csv(&r.acc[&loc]))?;
    }
    write_file(&dir.join("rest.csv"), &write_breath_csv(&r.rest))?;
    write_file(&dir.join("adl.csv"), &write_breath_csv(&r.adl))?;
    write_file(&dir.join(TRUTH_FILE), &write_truth_csv(&s.truth))
}

pub fn write_manifest(cfg: &GeneratorConfig, summary: &DatasetSummary) -> String {
    let mut out = format!("generator = paee-core {}\n", env!("CARGO_PKG_VERSION"));
    for (k, v) in cfg.entries() {
        let _ = writeln!(out, "{k} = {v}");
    }
    for (i, a) in cfg.protocol.iter().enumerate() {
        let duration = match a.duration {
            ActivityDuration::Fixed(d) => format!("{d}"),
            ActivityDuration::Range(lo, hi) => format!("{lo}-{hi}"),
        };
        let _ = writeln!(
            out,
            "activity.{i} = {} | duration_s {duration} | paee_wkg {} | com_gain {} | thigh_gain {} | wrist_gain {} | cadence_hz {} | bouts {}",
            a.name, a.paee_level, a.com_gain, a.thigh_gain, a.wrist_gain, a.cadence, a.bouts
        );
    }
    out.push_str(
        "assumption = wrist motion amplitude is drawn per activity independently of PAEE; \
         this is a modeling assumption, not a measured relation\n",
    );
    for s in &summary.subjects {
        let _ = writeln!(out, "subject.{}.order = {}", s.id, s.order.join("; "));
        let _ = writeln!(out, "subject.{}.clamped_gas_samples = {}", s.id, s.clamped);
    }
    let _ = writeln!(out, "clamped_gas_samples = {}", summary.clamped());
    out
}

/// Generates every subject into `out/<id>/` and writes `out/manifest.txt`.
pub fn generate_dataset(cfg: &GeneratorConfig, out: &Path) -> Result<DatasetSummary, SynthError> {
    cfg.validate()?;
    fs::create_dir_all(out).map_err(|source| SynthError::Io {
        path: out.to_path_buf(),
        source,
    })?;
    let subjects = (0..cfg.n_subjects)
        .into_par_iter()
        .map(|i| {
            let s = generate_subject(cfg, i)?;
            write_subject(&out.join(s.record.id()), &s)?;
            Ok(SubjectSummary {
                id: s.record.id().to_string(),
                order: s.order,
                clamped: s.clamped,
            })
        })
        .collect::<Result<Vec<_>, SynthError>>()?;
    let summary = DatasetSummary { subjects };
    write_file(&out.join(MANIFEST_FILE), &write_manifest(cfg, &summary))?;
    Ok(summary)
}
