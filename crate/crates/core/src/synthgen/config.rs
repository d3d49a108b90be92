use super::protocol::{default_protocol, ActivityProfile};
use super::SynthError;

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub n_subjects: usize,
    pub seed: u64,
    /// Mean breath interval in seconds.
    pub breath_interval: f64,
    /// Relative breath interval jitter; intervals are uniform in
    /// `breath_interval * [1 - j, 1 + j]`.
    pub breath_jitter: f64,
    pub rer: f64,
    pub rer_sd: f64,
    /// Resting VO2 and VCO2 in mL/min per kg body mass.
    pub rmr_vo2: f64,
    pub rmr_vco2: f64,
    /// Between-subject relative SD of the resting flows.
    pub rmr_sd: f64,
    pub acc_noise_sd: f64,
    pub gas_noise_sd: f64,
    /// Talking spikes per minute.
    pub talking_artifact_rate: f64,
    pub transition_tau: f64,
    /// Log-scale SD of the per-(subject, activity) movement intensity.
    pub movement_sd: f64,
    /// Log-scale SD of the per-(subject, activity) metabolic cost per unit
    /// movement. Invisible to every accelerometer.
    pub efficiency_sd: f64,
    /// Log-scale SD of the per-(subject, activity, sensor) pelvis and thigh
    /// amplitude factor.
    pub placement_gain_sd: f64,
    /// Log-scale SD of the per-(subject, activity, wrist) amplitude factor.
    pub wrist_gain_sd: f64,
    pub protocol: Vec<ActivityProfile>,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            n_subjects: 9,
            seed: 42,
            breath_interval: 3.0,
            breath_jitter: 0.3,
            rer: 0.85,
            rer_sd: 0.02,
            rmr_vo2: 3.0,
            rmr_vco2: 2.5,
            rmr_sd: 0.1,
            acc_noise_sd: 0.05,
            gas_noise_sd: 40.0,
            talking_artifact_rate: 0.3,
            transition_tau: 30.0,
            movement_sd: 0.4,
            efficiency_sd: 0.15,
            placement_gain_sd: 0.3,
            wrist_gain_sd: 0.5,
            protocol: default_protocol(),
        }
    }
}

impl GeneratorConfig {
    /// Default config with every random variation switched off: no sensor or
    /// gas noise, no talking, identical subjects apart from body size and
    /// activity order.
    pub fn noiseless(seed: u64) -> Self {
        GeneratorConfig {
            seed,
            rer_sd: 0.0,
            rmr_sd: 0.0,
            acc_noise_sd: 0.0,
            gas_noise_sd: 0.0,
            talking_artifact_rate: 0.0,
            movement_sd: 0.0,
            efficiency_sd: 0.0,
            placement_gain_sd: 0.0,
            wrist_gain_sd: 0.0,
            ..GeneratorConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::ConfigInvalid(m));
        if self.n_subjects < 2 || self.n_subjects > 999 {
            return bad(format!("n_subjects must be in [2, 999], got {}", self.n_subjects));
        }
        if !(self.breath_interval.is_finite() && self.breath_interval > 0.0) {
            return bad(format!("breath_interval must be > 0, got {}", self.breath_interval));
        }
        if !(0.0..1.0).contains(&self.breath_jitter) {
            return bad(format!("breath_jitter must be in [0, 1), got {}", self.breath_jitter));
        }
        if !(0.7..=1.0).contains(&self.rer) {
            return bad(format!("rer must be in [0.7, 1.0], got {}", self.rer));
        }
        for (k, v) in [("rmr_vo2", self.rmr_vo2), ("rmr_vco2", self.rmr_vco2)] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{k} must be > 0, got {v}"));
            }
        }
        if !(self.transition_tau.is_finite() && self.transition_tau > 0.0) {
            return bad(format!("transition_tau must be > 0, got {}", self.transition_tau));
        }
        for (k, v) in [
            ("rer_sd", self.rer_sd),
            ("rmr_sd", self.rmr_sd),
            ("acc_noise_sd", self.acc_noise_sd),
            ("gas_noise_sd", self.gas_noise_sd),
            ("talking_artifact_rate", self.talking_artifact_rate),
            ("movement_sd", self.movement_sd),
            ("efficiency_sd", self.efficiency_sd),
            ("placement_gain_sd", self.placement_gain_sd),
            ("wrist_gain_sd", self.wrist_gain_sd),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return bad(format!("{k} must be >= 0, got {v}"));
            }
        }
        if self.protocol.is_empty() {
            return bad("protocol has no activities".into());
        }
        for a in &self.protocol {
            a.validate()?;
        }
        Ok(())
    }

    /// Sets one scalar field from its `key = value` form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), SynthError> {
        let bad = |e: String| SynthError::ConfigInvalid(format!("{key} = {value}: {e}"));
        let float = || value.parse::<f64>().map_err(|e| bad(e.to_string()));
        match key {
            "n_subjects" => self.n_subjects = value.parse().map_err(|e| bad(format!("{e}")))?,
            "seed" => self.seed = value.parse().map_err(|e| bad(format!("{e}")))?,
            "breath_interval" => self.breath_interval = float()?,
            "breath_jitter" => self.breath_jitter = float()?,
            "rer" => self.rer = float()?,
            "rer_sd" => self.rer_sd = float()?,
            "rmr_vo2" => self.rmr_vo2 = float()?,
            "rmr_vco2" => self.rmr_vco2 = float()?,
            "rmr_sd" => self.rmr_sd = float()?,
            "acc_noise_sd" => self.acc_noise_sd = float()?,
            "gas_noise_sd" => self.gas_noise_sd = float()?,
            "talking_artifact_rate" => self.talking_artifact_rate = float()?,
            "transition_tau" => self.transition_tau = float()?,
            "movement_sd" => self.movement_sd = float()?,
            "efficiency_sd" => self.efficiency_sd = float()?,
            "placement_gain_sd" => self.placement_gain_sd = float()?,
            "wrist_gain_sd" => self.wrist_gain_sd = float()?,
            _ => return Err(bad("unknown key".into())),
        }
        Ok(())
    }

    pub fn is_key(key: &str) -> bool {
        GeneratorConfig::default()
            .entries()
            .iter()
            .any(|(k, _)| *k == key)
    }

    /// Scalar fields as `(key, value)` pairs in a fixed order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        vec![
            ("n_subjects", self.n_subjects.to_string()),
            ("seed", self.seed.to_string()),
            ("breath_interval", self.breath_interval.to_string()),
            ("breath_jitter", self.breath_jitter.to_string()),
            ("rer", self.rer.to_string()),
            ("rer_sd", self.rer_sd.to_string()),
            ("rmr_vo2", self.rmr_vo2.to_string()),
            ("rmr_vco2", self.rmr_vco2.to_string()),
            ("rmr_sd", self.rmr_sd.to_string()),
            ("acc_noise_sd", self.acc_noise_sd.to_string()),
            ("gas_noise_sd", self.gas_noise_sd.to_string()),
            ("talking_artifact_rate", self.talking_artifact_rate.to_string()),
            ("transition_tau", self.transition_tau.to_string()),
            ("movement_sd", self.movement_sd.to_string()),
            ("efficiency_sd", self.efficiency_sd.to_string()),
            ("placement_gain_sd", self.placement_gain_sd.to_string()),
            ("wrist_gain_sd", self.wrist_gain_sd.to_string()),
        ]
    }
}
