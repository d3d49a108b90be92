use std::fmt::Write as _;

use super::{BreathSeries, DataError, RawTriaxialSeries, Sex, SubjectMeta};

pub const ACC_HEADER: &str = "t_s,ax,ay,az";
pub const BREATH_HEADER: &str = "t_s,vo2_ml_min,vco2_ml_min,label";
pub const META_HEADER: &str = "id,sex,age,height_cm,mass_kg";

fn reader<'t>(text: &'t str, expected: &str) -> Result<csv::Reader<&'t [u8]>, DataError> {
    if text.trim().is_empty() {
        return Err(DataError::EmptyFile);
    }
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(text.as_bytes());
    let found = rdr
        .headers()
        .map_err(|e| DataError::MalformedRow {
            line: 1,
            reason: e.to_string(),
        })?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    if found != expected {
        return Err(DataError::BadHeader {
            expected: expected.to_string(),
            found,
        });
    }
    Ok(rdr)
}

/// Iterates data rows, checking the field count and reporting 1-based line numbers.
fn rows<'a, 'b: 'a>(
    rdr: &'a mut csv::Reader<&'b [u8]>,
    fields: usize,
) -> impl Iterator<Item = Result<(u64, csv::StringRecord), DataError>> + use<'a, 'b> {
    rdr.records().map(move |r| {
        let rec = r.map_err(|e| DataError::MalformedRow {
            line: e.position().map_or(0, |p| p.line()),
            reason: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != fields {
            return Err(DataError::MalformedRow {
                line,
                reason: format!("expected {fields} fields, found {}", rec.len()),
            });
        }
        Ok((line, rec))
    })
}

fn number(rec: &csv::StringRecord, i: usize, line: u64) -> Result<f64, DataError> {
    let field = &rec[i];
    let v: f64 = field.parse().map_err(|_| DataError::MalformedRow {
        line,
        reason: format!("`{field}` is not a number"),
    })?;
    if !v.is_finite() {
        return Err(DataError::MalformedRow {
            line,
            reason: format!("`{field}` is not finite"),
        });
    }
    Ok(v)
}

pub fn parse_acc_csv(text: &str) -> Result<RawTriaxialSeries, DataError> {
    let mut rdr = reader(text, ACC_HEADER)?;
    let (mut t, mut ax, mut ay, mut az) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for row in rows(&mut rdr, 4) {
        let (line, rec) = row?;
        t.push(number(&rec, 0, line)?);
        ax.push(number(&rec, 1, line)?);
        ay.push(number(&rec, 2, line)?);
        az.push(number(&rec, 3, line)?);
    }
    RawTriaxialSeries::new(t, ax, ay, az)
}

pub fn parse_breath_csv(text: &str) -> Result<BreathSeries, DataError> {
    let mut rdr = reader(text, BREATH_HEADER)?;
    let (mut t, mut vo2, mut vco2, mut labels) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for row in rows(&mut rdr, 4) {
        let (line, rec) = row?;
        t.push(number(&rec, 0, line)?);
        vo2.push(number(&rec, 1, line)?);
        vco2.push(number(&rec, 2, line)?);
        labels.push(rec[3].to_string());
    }
    BreathSeries::new(t, vo2, vco2, labels)
}

pub fn parse_meta_csv(text: &str) -> Result<SubjectMeta, DataError> {
    let mut rdr = reader(text, META_HEADER)?;
    let mut metas = Vec::new();
    for row in rows(&mut rdr, 5) {
        let (line, rec) = row?;
        let sex: Sex = rec[1].parse()?;
        let age: u32 = rec[2].parse().map_err(|_| DataError::MalformedRow {
            line,
            reason: format!("`{}` is not an integer age", &rec[2]),
        })?;
        metas.push(SubjectMeta::new(
            &rec[0],
            sex,
            age,
            number(&rec, 3, line)?,
            number(&rec, 4, line)?,
        )?);
    }
    match metas.len() {
        0 => Err(DataError::EmptyFile),
        1 => Ok(metas.remove(0)),
        n => Err(DataError::InvalidMeta(format!(
            "expected one data row, found {n}"
        ))),
    }
}

// Floats are written with `Display`, the shortest representation that parses
// back to the same bits, so parse∘write is exact.

pub fn write_acc_csv(s: &RawTriaxialSeries) -> String {
    let mut out = String::with_capacity(s.len() * 36 + 16);
    out.push_str(ACC_HEADER);
    out.push('\n');
    let [ax, ay, az] = s.axes();
    for (i, t) in s.timestamps().iter().enumerate() {
        let _ = writeln!(out, "{},{},{},{}", t, ax[i], ay[i], az[i]);
    }
    out
}

pub fn write_breath_csv(s: &BreathSeries) -> String {
    let mut out = String::with_capacity(s.len() * 40 + 40);
    out.push_str(BREATH_HEADER);
    out.push('\n');
    for i in 0..s.len() {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            s.timestamps()[i],
            s.vo2()[i],
            s.vco2()[i],
            s.labels()[i]
        );
    }
    out
}

pub fn write_meta_csv(m: &SubjectMeta) -> String {
    format!(
        "{META_HEADER}\n{},{},{},{},{}\n",
        m.id, m.sex, m.age, m.height_cm, m.mass_kg
    )
}
