use super::SynthError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ActivityDuration {
    Fixed(f64),
    /// Drawn uniformly from `[min, max]` per subject.
    Range(f64, f64),
}

impl ActivityDuration {
    pub fn max(self) -> f64 {
        match self {
            ActivityDuration::Fixed(d) => d,
            ActivityDuration::Range(_, hi) => hi,
        }
    }

    pub fn min(self) -> f64 {
        match self {
            ActivityDuration::Fixed(d) => d,
            ActivityDuration::Range(lo, _) => lo,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActivityProfile {
    pub name: String,
    pub duration: ActivityDuration,
    /// Plateau PAEE in W/kg.
    pub paee_level: f64,
    /// Pelvis motion amplitude per W/kg, in m/s² as seen on the 1 Hz grid.
    pub com_gain: f64,
    /// Thigh motion amplitude per W/kg, same units as `com_gain`.
    pub thigh_gain: f64,
    /// Typical wrist motion amplitude in m/s², independent of PAEE.
    pub wrist_gain: f64,
    /// Dominant pelvis and thigh motion frequency in Hz.
    pub cadence: f64,
    /// Number of bouts separated by short pauses.
    pub bouts: usize,
}

impl ActivityProfile {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |what: &str| {
            Err(SynthError::ConfigInvalid(format!(
                "activity `{}`: {what}",
                self.name
            )))
        };
        if self.name.is_empty() || self.name.contains([',', '\n', '"']) {
            return bad("name must be non-empty without commas, quotes or newlines");
        }
        let (lo, hi) = (self.duration.min(), self.duration.max());
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi) {
            return bad("duration must be positive");
        }
        if !(self.paee_level.is_finite() && self.paee_level >= 0.0) {
            return bad("paee_level must be >= 0");
        }
        for g in [self.com_gain, self.thigh_gain, self.wrist_gain] {
            if !(g.is_finite() && g >= 0.0) {
                return bad("gains must be >= 0");
            }
        }
        if !(self.cadence.is_finite() && self.cadence > 0.0)
            || super::generate::acc_retention(self.cadence) < super::generate::MIN_RETENTION
        {
            return bad("cadence too close to a whole number of Hz or above 6 Hz");
        }
        if self.bouts == 0 {
            return bad("bouts must be >= 1");
        }
        if self.bouts > 1 && lo <= (self.bouts - 1) as f64 * super::generate::BOUT_PAUSE_S {
            return bad("duration too short for its pauses");
        }
        Ok(())
    }
}

fn activity(
    name: &str,
    duration: ActivityDuration,
    paee_level: f64,
    com_gain: f64,
    thigh_gain: f64,
    wrist_gain: f64,
    cadence: f64,
) -> ActivityProfile {
    ActivityProfile {
        name: name.to_string(),
        duration,
        paee_level,
        com_gain,
        thigh_gain,
        wrist_gain,
        cadence,
        bouts: 1,
    }
}

/// The eleven protocol activities. Activities without a fixed duration
/// last 120 to 300 s.
pub fn default_protocol() -> Vec<ActivityProfile> {
    use ActivityDuration::{Fixed, Range};
    let x = Range(120.0, 300.0);
    let mut stairs = activity("Climbing stairs (5 times)", x, 5.0, 0.080, 0.095, 0.60, 1.6);
    stairs.bouts = 5;
    vec![
        activity("Sitting resting", Fixed(300.0), 0.10, 0.100, 0.100, 0.30, 0.45),
        activity("Sitting reading", Fixed(300.0), 0.20, 0.100, 0.100, 0.35, 0.45),
        activity("Standing still", Fixed(180.0), 0.35, 0.100, 0.100, 0.60, 0.55),
        activity("Working on a laptop", x, 0.50, 0.085, 0.085, 1.00, 0.55),
        activity("Emptying dishwasher", x, 1.50, 0.080, 0.070, 1.00, 0.70),
        activity("Mopping", x, 2.40, 0.075, 0.070, 0.60, 0.80),
        activity("Stacking shelves with books", x, 1.70, 0.078, 0.070, 1.00, 0.65),
        stairs,
        activity("Treadmill (3 km/h)", Fixed(300.0), 3.30, 0.085, 0.085, 0.30, 1.4),
        activity("Treadmill (5 km/h)", Fixed(300.0), 4.80, 0.082, 0.085, 1.00, 1.8),
        activity("Cycle at 125 Watt", Fixed(300.0), 5.30, 0.076, 0.110, 0.30, 1.2),
    ]
}
