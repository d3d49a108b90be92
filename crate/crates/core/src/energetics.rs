//! Resting metabolic rate, gas-exchange to power conversion and the PAEE
//! ground truth (total expenditure minus resting expenditure, per kg).

use thiserror::Error;

use crate::data::{BreathSeries, UniformSeries};

/// Rest data excluded from the RMR average, in seconds.
pub const RMR_DISCARD_SECONDS: f64 = 300.0;
/// Weir oxygen coefficient, kcal per litre O2.
pub const WEIR_O2: f64 = 3.941;
/// Weir carbon-dioxide coefficient, kcal per litre CO2.
pub const WEIR_CO2: f64 = 1.106;
/// Watts per kcal/min.
pub const WATTS_PER_KCAL_MIN: f64 = 69.733;

#[derive(Debug, Error, PartialEq)]
pub enum EnergeticsError {
    #[error("rest period of {duration:.1} s does not extend past the {discard} s discard window")]
    RestTooShort { duration: f64, discard: f64 },
    #[error("gas series differ in start or length")]
    LengthMismatch,
    #[error("body mass must be positive, got {0}")]
    NonPositiveMass(f64),
}

/// Resting gas exchange in mL/min.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RmrEstimate {
    pub vo2: f64,
    pub vco2: f64,
}

/// PAEE in W/kg on a 1 Hz grid. Values below zero are kept.
#[derive(Debug, Clone, PartialEq)]
pub struct PaeeSeries(pub UniformSeries);

impl PaeeSeries {
    pub fn series(&self) -> &UniformSeries {
        &self.0
    }

    pub fn values(&self) -> &[f64] {
        &self.0.values
    }
}

/// Mean VO2 and VCO2 over breaths at least `discard` seconds after the first rest breath.
pub fn estimate_rmr(rest: &BreathSeries, discard: f64) -> Result<RmrEstimate, EnergeticsError> {
    let t = rest.timestamps();
    let cutoff = t[0] + discard;
    let kept: Vec<usize> = (0..rest.len()).filter(|&i| t[i] >= cutoff).collect();
    if rest.duration() <= discard || kept.is_empty() {
        return Err(EnergeticsError::RestTooShort {
            duration: rest.duration(),
            discard,
        });
    }
    let n = kept.len() as f64;
    Ok(RmrEstimate {
        vo2: kept.iter().map(|&i| rest.vo2()[i]).sum::<f64>() / n,
        vco2: kept.iter().map(|&i| rest.vco2()[i]).sum::<f64>() / n,
    })
}

/// Weir equation without protein correction; flows in mL/min, result in W.
pub fn weir_power(vo2_ml_min: f64, vco2_ml_min: f64) -> f64 {
    (WEIR_O2 * vo2_ml_min / 1000.0 + WEIR_CO2 * vco2_ml_min / 1000.0) * WATTS_PER_KCAL_MIN
}

/// Per-second PAEE from (smoothed) activity gas flows: RMR flows are
/// subtracted first, the difference converted to watts and divided by mass.
pub fn derive_paee(
    vo2: &UniformSeries,
    vco2: &UniformSeries,
    rmr: RmrEstimate,
    mass_kg: f64,
) -> Result<PaeeSeries, EnergeticsError> {
    if !(mass_kg > 0.0) {
        return Err(EnergeticsError::NonPositiveMass(mass_kg));
    }
    if vo2.len() != vco2.len() || vo2.start != vco2.start || vo2.rate != vco2.rate {
        return Err(EnergeticsError::LengthMismatch);
    }
    let values = vo2
        .values
        .iter()
        .zip(&vco2.values)
        .map(|(o, c)| weir_power(o - rmr.vo2, c - rmr.vco2) / mass_kg)
        .collect();
    Ok(PaeeSeries(UniformSeries::new(vo2.start, vo2.rate, values)))
}
