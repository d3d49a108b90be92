use super::{DataError, UniformSeries, UniformTriaxial};

const GRID_TOLERANCE: f64 = 1e-6;

/// Half-open interval `[start, start + len)` in seconds on a 1 Hz grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Span {
    pub start: f64,
    pub len: usize,
}

impl Span {
    pub fn end(&self) -> f64 {
        self.start + self.len as f64
    }
}

/// A 1 Hz series of either kind, so mixed lists can be cropped together.
#[derive(Debug, Clone, PartialEq)]
pub enum GridSeries {
    Scalar(UniformSeries),
    Triaxial(UniformTriaxial),
}

impl GridSeries {
    fn rate(&self) -> f64 {
        match self {
            GridSeries::Scalar(s) => s.rate,
            GridSeries::Triaxial(s) => s.rate,
        }
    }

    pub fn span(&self) -> Span {
        match self {
            GridSeries::Scalar(s) => Span {
                start: s.start,
                len: s.len(),
            },
            GridSeries::Triaxial(s) => Span {
                start: s.start,
                len: s.len(),
            },
        }
    }

    fn crop(&self, offset: usize, len: usize) -> GridSeries {
        match self {
            GridSeries::Scalar(s) => GridSeries::Scalar(UniformSeries::new(
                s.time_at(offset),
                s.rate,
                s.values[offset..offset + len].to_vec(),
            )),
            GridSeries::Triaxial(s) => {
                let [x, y, z] = s.channels();
                GridSeries::Triaxial(
                    UniformTriaxial::new(
                        s.start + offset as f64 / s.rate,
                        s.rate,
                        x[offset..offset + len].to_vec(),
                        y[offset..offset + len].to_vec(),
                        z[offset..offset + len].to_vec(),
                    )
                    .expect("cropped channels keep equal lengths"),
                )
            }
        }
    }
}

/// Intersection of 1 Hz spans, together with each input's sample offset into it.
pub fn common_span(spans: &[Span]) -> Result<(Span, Vec<usize>), DataError> {
    let start = spans
        .iter()
        .map(|s| s.start)
        .fold(f64::NEG_INFINITY, f64::max);
    let end = spans.iter().map(|s| s.end()).fold(f64::INFINITY, f64::min);
    if spans.is_empty() || !(end > start) {
        return Err(DataError::NoOverlap);
    }
    let mut offsets = Vec::with_capacity(spans.len());
    for s in spans {
        let off = start - s.start;
        if (off - off.round()).abs() > GRID_TOLERANCE {
            return Err(DataError::Misaligned);
        }
        offsets.push(off.round() as usize);
    }
    let len = ((end - start) + GRID_TOLERANCE).floor() as usize;
    if len == 0 {
        return Err(DataError::NoOverlap);
    }
    Ok((Span { start, len }, offsets))
}

/// Crops every series to the span they all cover. Order is preserved.
pub fn align_overlap(series: &[GridSeries]) -> Result<Vec<GridSeries>, DataError> {
    if let Some(bad) = series
        .iter()
        .find(|s| (s.rate() - 1.0).abs() > GRID_TOLERANCE)
    {
        return Err(DataError::NotOneHertz(bad.rate()));
    }
    let spans: Vec<Span> = series.iter().map(GridSeries::span).collect();
    let (span, offsets) = common_span(&spans)?;
    Ok(series
        .iter()
        .zip(offsets)
        .map(|(s, off)| s.crop(off, span.len))
        .collect())
}
