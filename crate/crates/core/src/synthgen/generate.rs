use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::config::GeneratorConfig;
use super::protocol::ActivityDuration;
use super::SynthError;
use crate::data::{
    BreathSeries, RawTriaxialSeries, SensorLocation, Sex, SubjectMeta, SubjectRecord,
    UniformSeries, NOMINAL_ACC_RATE_HZ,
};
use crate::dsp::{design_butterworth_lowpass, GRAVITY_CUTOFF_HZ, GRAVITY_FILTER_ORDER};
use crate::energetics::{WATTS_PER_KCAL_MIN, WEIR_CO2, WEIR_O2};
use crate::preprocess::{ACC_LOWPASS_HZ, ACC_LOWPASS_ORDER};

/// The activity session starts this many seconds after the rest period starts.
pub const REST_SECONDS: f64 = 1830.0;
pub(crate) const BOUT_PAUSE_S: f64 = 10.0;
/// Movement and PAEE targets during stair pauses, relative to the bouts.
const PAUSE_FRACTION: f64 = 0.1;
pub(crate) const MIN_RETENTION: f64 = 0.04;
const REST_LABEL: &str = "Supine rest";
/// PAEE when lying down, decaying over the first minutes of rest.
const REST_ONSET_PAEE: f64 = 0.3;
const REST_DECAY_S: f64 = 120.0;
const GRAVITY: f64 = 9.81;
const WRIST_BANDS: [(f64, f64); 2] = [(0.4, 0.85), (1.15, 1.7)];
/// Wrist motion changes amplitude and rhythm after this many seconds.
const WRIST_BOUT_S: (f64, f64) = (20.0, 60.0);

/// Amplitude of the 1 Hz bin means of a unit sinusoid at `f` Hz after the
/// acceleration preprocessing chain (6 Hz low-pass, gravity removal, 1 s
/// bins at 30 Hz), in steady state.
pub fn acc_retention(f: f64) -> f64 {
    let fs = NOMINAL_ACC_RATE_HZ;
    if !(f > 0.0 && f < fs / 2.0) {
        return 0.0;
    }
    let omega = 2.0 * PI * f / fs;
    let lp = design_butterworth_lowpass(ACC_LOWPASS_ORDER, ACC_LOWPASS_HZ, fs)
        .expect("fixed design")
        .response(omega)
        .norm_sqr();
    let g = design_butterworth_lowpass(GRAVITY_FILTER_ORDER, GRAVITY_CUTOFF_HZ, fs)
        .expect("fixed design")
        .response(omega)
        .norm_sqr();
    let bin = ((PI * f).sin() / (fs * (PI * f / fs).sin())).abs();
    bin * (1.0 - g) * lp
}

/// One subject's session with its ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedSubject {
    pub record: SubjectRecord,
    /// True PAEE in W/kg at whole seconds of the activity session.
    pub truth: UniformSeries,
    /// Activity names in performed order.
    pub order: Vec<String>,
    /// Gas samples clamped at zero after noise.
    pub clamped: usize,
}

/// First-order relaxation towards piecewise-constant targets.
struct Relaxation {
    starts: Vec<f64>,
    targets: Vec<f64>,
    initial: Vec<f64>,
    tau: f64,
}

impl Relaxation {
    fn new(starts: Vec<f64>, targets: Vec<f64>, x0: f64, tau: f64) -> Self {
        let mut initial = vec![x0];
        for i in 1..starts.len() {
            let prev = initial[i - 1];
            let dt = starts[i] - starts[i - 1];
            initial.push(targets[i - 1] + (prev - targets[i - 1]) * (-dt / tau).exp());
        }
        Relaxation {
            starts,
            targets,
            initial,
            tau,
        }
    }

    fn at(&self, t: f64) -> f64 {
        let i = self.starts.partition_point(|&s| s <= t).saturating_sub(1);
        let (x0, target) = (self.initial[i], self.targets[i]);
        target + (x0 - target) * (-(t - self.starts[i]) / self.tau).exp()
    }
}

#[derive(Debug, Clone)]
struct Plateau {
    start: f64,
    activity: usize,
    paee: f64,
    /// Pelvis, left thigh, right thigh amplitude targets on the 1 Hz grid.
    com: [f64; 3],
    cadence: f64,
    phase: f64,
}

/// Stretch of constant wrist motion, left then right.
#[derive(Debug, Clone)]
struct WristBout {
    start: f64,
    amp: [f64; 2],
    freq: [f64; 2],
    phase: [f64; 2],
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Nearest multiple of `step`, which must be 1 or a power of ten below 1.
/// Dividing by the inverse step gives the shortest decimal text.
fn round_to(v: f64, step: f64) -> f64 {
    let inv = (1.0 / step).round();
    (v * inv).round() / inv
}

fn subject_meta(rng: &mut ChaCha8Rng, index: usize) -> Result<SubjectMeta, SynthError> {
    let sex = if rng.gen_bool(0.5) { Sex::F } else { Sex::M };
    let age = rng.gen_range(20..=35);
    let (mu, sd) = match sex {
        Sex::F => (166.0, 6.0),
        Sex::M => (179.0, 7.0),
    };
    let height = round_to(mu + sd * normal(rng), 0.1);
    let bmi = rng.gen_range(19.0..30.0);
    let mass = round_to(bmi * (height / 100.0_f64).powi(2), 0.1);
    Ok(SubjectMeta::new(format!("S{:02}", index + 1), sex, age, height, mass)?)
}

fn wrist_frequency(rng: &mut ChaCha8Rng) -> f64 {
    let (lo, hi) = WRIST_BANDS[rng.gen_range(0..WRIST_BANDS.len())];
    rng.gen_range(lo..hi)
}

struct Schedule {
    plateaus: Vec<Plateau>,
    wrist: Vec<WristBout>,
    end: f64,
}

/// Activities after the rest period.
fn schedule(cfg: &GeneratorConfig, rng: &mut ChaCha8Rng, order: &[usize]) -> Schedule {
    let mut plateaus = Vec::new();
    let mut wrist = Vec::new();
    let mut t = REST_SECONDS;
    for &a in order {
        let p = &cfg.protocol[a];
        let duration = match p.duration {
            ActivityDuration::Fixed(d) => d,
            ActivityDuration::Range(lo, hi) => round_to(rng.gen_range(lo..=hi), 1.0),
        };
        let movement = p.paee_level * (cfg.movement_sd * normal(rng)).exp();
        let efficiency = (cfg.efficiency_sd * normal(rng)).exp();
        let placement: [f64; 3] =
            std::array::from_fn(|_| (cfg.placement_gain_sd * normal(rng)).exp());
        let cadence = p.cadence * rng.gen_range(0.97..1.03);
        let phase = rng.gen_range(0.0..2.0 * PI);
        let gains = [p.com_gain, p.thigh_gain, p.thigh_gain];
        let com = |scale: f64| -> [f64; 3] {
            std::array::from_fn(|i| gains[i] * placement[i] * movement * scale)
        };
        let plateau = |start: f64, scale: f64| Plateau {
            start,
            activity: a,
            paee: movement * efficiency * scale,
            com: com(scale),
            cadence,
            phase,
        };
        let pauses = (p.bouts - 1) as f64 * BOUT_PAUSE_S;
        let bout = (duration - pauses) / p.bouts as f64;
        for b in 0..p.bouts {
            let start = t + b as f64 * (bout + BOUT_PAUSE_S);
            plateaus.push(plateau(start, 1.0));
            if b + 1 < p.bouts {
                plateaus.push(plateau(start + bout, PAUSE_FRACTION));
            }
        }
        let mut w = t;
        while w < t + duration {
            wrist.push(WristBout {
                start: w,
                amp: std::array::from_fn(|_| {
                    p.wrist_gain * (cfg.wrist_gain_sd * normal(rng)).exp()
                }),
                freq: std::array::from_fn(|_| wrist_frequency(rng)),
                phase: std::array::from_fn(|_| rng.gen_range(0.0..2.0 * PI)),
            });
            w += rng.gen_range(WRIST_BOUT_S.0..WRIST_BOUT_S.1);
        }
        t += duration;
    }
    Schedule {
        plateaus,
        wrist,
        end: t,
    }
}

struct GasModel<'a> {
    cfg: &'a GeneratorConfig,
    mass: f64,
    rmr_vo2: f64,
    rmr_vco2: f64,
    clamped: usize,
}

impl GasModel<'_> {
    /// Breaths in `[from, to]` sampling the PAEE trace `paee` (W/kg).
    fn breaths(
        &mut self,
        rng: &mut ChaCha8Rng,
        from: f64,
        to: f64,
        paee: impl Fn(f64) -> f64,
        label: impl Fn(f64) -> String,
    ) -> Result<BreathSeries, SynthError> {
        let cfg = self.cfg;
        let jitter = |rng: &mut ChaCha8Rng| {
            cfg.breath_interval * (1.0 + cfg.breath_jitter * rng.gen_range(-1.0..=1.0))
        };
        let talk_p = (cfg.talking_artifact_rate * cfg.breath_interval / 60.0).min(1.0);
        let (mut ts, mut vo2s, mut vco2s, mut labels) = (vec![], vec![], vec![], vec![]);
        let mut t = from + rng.gen_range(0.0..1.0) * cfg.breath_interval;
        while t <= to {
            let rer = (cfg.rer + cfg.rer_sd * normal(rng)).clamp(0.7, 1.0);
            let watts = paee(t) * self.mass;
            let dvo2 = watts * 1000.0 / (WATTS_PER_KCAL_MIN * (WEIR_O2 + WEIR_CO2 * rer));
            let mut vo2 = self.rmr_vo2 + dvo2;
            let mut vco2 = self.rmr_vco2 + rer * dvo2;
            let talking = rng.gen_bool(talk_p);
            let boost = 1.0 + rng.gen_range(0.2..0.6);
            if talking {
                vo2 *= boost;
                vco2 *= boost;
            }
            vo2 += cfg.gas_noise_sd * normal(rng);
            vco2 += cfg.gas_noise_sd * normal(rng);
            for v in [&mut vo2, &mut vco2] {
                if *v < 0.0 {
                    *v = 0.0;
                    self.clamped += 1;
                }
            }
            let rt = round_to(t, 0.001);
            if ts.last().map_or(true, |&last| rt > last) {
                ts.push(rt);
                vo2s.push(round_to(vo2, 0.01));
                vco2s.push(round_to(vco2, 0.01));
                labels.push(label(t));
            }
            t += jitter(rng);
        }
        Ok(BreathSeries::new(ts, vo2s, vco2s, labels)?)
    }
}

/// Constant gravity direction of one sensor, slightly tilted per subject.
fn gravity(rng: &mut ChaCha8Rng, loc: SensorLocation) -> [f64; 3] {
    let base = match loc {
        SensorLocation::Pelvis => [0.3, 0.2, 1.0],
        SensorLocation::LeftThigh | SensorLocation::RightThigh => [0.4, 0.1, 1.0],
        SensorLocation::LeftWrist | SensorLocation::RightWrist => [0.6, -0.5, 0.6],
    };
    let v: [f64; 3] = std::array::from_fn(|i| base[i] + 0.15 * normal(rng));
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.map(|x| round_to(GRAVITY * x / n, 0.001))
}

/// Oscillation of one stretch of a sensor signal.
struct Carrier {
    start: f64,
    freq: f64,
    phase: f64,
    /// Raw amplitude per unit of amplitude on the 1 Hz grid.
    inv_gain: f64,
}

impl Carrier {
    fn new(start: f64, freq: f64, phase: f64) -> Self {
        Carrier {
            start,
            freq,
            phase,
            inv_gain: 1.0 / acc_retention(freq),
        }
    }
}

fn accelerometer(
    cfg: &GeneratorConfig,
    rng: &mut ChaCha8Rng,
    loc: SensorLocation,
    sched: &Schedule,
) -> Result<RawTriaxialSeries, SynthError> {
    let g = gravity(rng, loc);
    let com_index = match loc {
        SensorLocation::Pelvis => Some(0),
        SensorLocation::LeftThigh => Some(1),
        SensorLocation::RightThigh => Some(2),
        _ => None,
    };
    let side = usize::from(loc == SensorLocation::RightWrist);
    let (carriers, envelope): (Vec<Carrier>, Box<dyn Fn(f64, usize) -> f64 + '_>) =
        match com_index {
            Some(i) => {
                let env = Relaxation::new(
                    sched.plateaus.iter().map(|p| p.start).collect(),
                    sched.plateaus.iter().map(|p| p.com[i]).collect(),
                    0.0,
                    cfg.transition_tau,
                );
                let c = sched
                    .plateaus
                    .iter()
                    .map(|p| Carrier::new(p.start, p.cadence, p.phase))
                    .collect();
                (c, Box::new(move |t, _| env.at(t)))
            }
            None => {
                let c = sched
                    .wrist
                    .iter()
                    .map(|w| Carrier::new(w.start, w.freq[side], w.phase[side]))
                    .collect();
                (c, Box::new(move |_, j| sched.wrist[j].amp[side]))
            }
        };
    let start = REST_SECONDS;
    let n = ((sched.end - start) * NOMINAL_ACC_RATE_HZ).floor() as usize;
    let mut t_out = Vec::with_capacity(n);
    let mut axes: [Vec<f64>; 3] = std::array::from_fn(|_| Vec::with_capacity(n));
    let mut j = 0;
    for k in 0..n {
        let t = start + k as f64 / NOMINAL_ACC_RATE_HZ;
        while j + 1 < carriers.len() && carriers[j + 1].start <= t {
            j += 1;
        }
        let c = &carriers[j];
        let amp = envelope(t, j) * c.inv_gain;
        let arg = 2.0 * PI * c.freq * (t - c.start) + c.phase;
        for (axis, out) in axes.iter_mut().enumerate() {
            let motion = amp * (arg + 2.0 * PI * axis as f64 / 3.0).sin();
            let noise = cfg.acc_noise_sd * normal(rng);
            out.push(round_to(g[axis] + motion + noise, 0.001));
        }
        t_out.push(round_to(t, 0.0001));
    }
    let [x, y, z] = axes;
    Ok(RawTriaxialSeries::new(t_out, x, y, z)?)
}

/// Generates subject `index` (0-based). The result depends only on the
/// config and `index`.
pub fn generate_subject(
    cfg: &GeneratorConfig,
    index: usize,
) -> Result<GeneratedSubject, SynthError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64 + 1);
    let mut gas_rng = ChaCha8Rng::seed_from_u64(rng.gen());
    let mut acc_rng = ChaCha8Rng::seed_from_u64(rng.gen());

    let meta = subject_meta(&mut rng, index)?;
    let mut order: Vec<usize> = (0..cfg.protocol.len()).collect();
    order.shuffle(&mut rng);
    let sched = schedule(cfg, &mut rng, &order);
    let (plateaus, end) = (&sched.plateaus, sched.end);

    let rmr_factor = (cfg.rmr_sd * normal(&mut rng)).exp();
    let mut gas = GasModel {
        cfg,
        mass: meta.mass_kg,
        rmr_vo2: cfg.rmr_vo2 * meta.mass_kg * rmr_factor,
        rmr_vco2: cfg.rmr_vco2 * meta.mass_kg * rmr_factor,
        clamped: 0,
    };
    let rest_paee = |t: f64| REST_ONSET_PAEE * (-t / REST_DECAY_S).exp();
    let rest = gas.breaths(&mut gas_rng, 0.0, REST_SECONDS, rest_paee, |_| {
        REST_LABEL.to_string()
    })?;
    let truth_trace = Relaxation::new(
        plateaus.iter().map(|p| p.start).collect(),
        plateaus.iter().map(|p| p.paee).collect(),
        rest_paee(REST_SECONDS),
        cfg.transition_tau,
    );
    let label_at = |t: f64| {
        let i = plateaus.partition_point(|p| p.start <= t).saturating_sub(1);
        cfg.protocol[plateaus[i].activity].name.clone()
    };
    let adl = gas.breaths(
        &mut gas_rng,
        REST_SECONDS,
        end,
        |t| truth_trace.at(t),
        label_at,
    )?;

    let mut acc = BTreeMap::new();
    for loc in SensorLocation::ALL {
        acc.insert(
            loc,
            accelerometer(cfg, &mut acc_rng, loc, &sched)?,
        );
    }

    let first = REST_SECONDS.ceil();
    let truth = UniformSeries::new(
        first,
        1.0,
        (0..=(end.floor() - first) as usize)
            .map(|k| round_to(truth_trace.at(first + k as f64), 1e-6))
            .collect(),
    );
    let clamped = gas.clamped;
    Ok(GeneratedSubject {
        record: SubjectRecord::new(meta, acc, rest, adl)?,
        truth,
        order: order.iter().map(|&a| cfg.protocol[a].name.clone()).collect(),
        clamped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn retention_matches_bin_mean_formula_at_low_frequency() {
        // Well inside both pass bands only the bin average matters.
        let f: f64 = 1.5;
        let bin = ((PI * f).sin() / (30.0 * (PI * f / 30.0).sin())).abs();
        assert!((acc_retention(f) - bin).abs() < 1e-3 * bin);
        assert!(acc_retention(1.0) < 1e-12);
        assert!(acc_retention(2.0) < 1e-12);
        assert_eq!(acc_retention(0.0), 0.0);
        assert_eq!(acc_retention(15.0), 0.0);
    }

    #[test]
    fn relaxation_is_continuous_and_reaches_targets() {
        let r = Relaxation::new(vec![0.0, 100.0, 400.0], vec![2.0, 5.0, 0.0], 0.0, 30.0);
        assert_eq!(r.at(0.0), 0.0);
        let before = r.at(100.0 - 1e-9);
        assert!((before - r.at(100.0)).abs() < 1e-9);
        assert!((r.at(399.0) - 5.0).abs() < 1e-3);
        assert!((r.at(30.0) - 2.0 * (1.0 - (-1.0f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn same_index_same_subject() {
        let mut cfg = GeneratorConfig::default();
        cfg.protocol.truncate(3);
        let a = generate_subject(&cfg, 3).unwrap();
        let b = generate_subject(&cfg, 3).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.record, generate_subject(&cfg, 4).unwrap().record);
        assert_eq!(a.record.id(), "S04");
    }

    #[test]
    fn invalid_config_rejected() {
        let cfg = GeneratorConfig {
            n_subjects: 1,
            ..GeneratorConfig::default()
        };
        assert!(matches!(
            generate_subject(&cfg, 0),
            Err(SynthError::ConfigInvalid(_))
        ));
    }

    #[test]
    fn stairs_have_five_bouts() {
        let cfg = GeneratorConfig::noiseless(5);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let stairs = cfg
            .protocol
            .iter()
            .position(|a| a.bouts == 5)
            .unwrap();
        let plateaus = schedule(&cfg, &mut rng, &[stairs]).plateaus;
        assert_eq!(plateaus.len(), 9);
        let full = plateaus.iter().filter(|p| p.paee == plateaus[0].paee).count();
        assert_eq!(full, 5);
    }
}
