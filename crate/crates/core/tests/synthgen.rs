use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use paee::data::{load_dataset, SensorLocation};
use paee::evaluation::{r_squared, EvaluationPair};
use paee::preprocess::{prepare_subject, PreparedSubject};
use paee::synthgen::{
    generate_dataset, generate_subject, parse_truth_csv, GeneratedSubject, GeneratorConfig,
    MANIFEST_FILE, TRUTH_FILE,
};
use proptest::prelude::*;

/// Prepared subject plus the true PAEE on the same 1 Hz grid.
fn prepared_with_truth(g: &GeneratedSubject) -> (PreparedSubject, Vec<f64>) {
    let p = prepare_subject(&g.record).unwrap();
    let k0 = (p.paee.series().start - g.truth.start).round() as usize;
    let truth = g.truth.values[k0..k0 + p.paee.values().len()].to_vec();
    (p, truth)
}

#[test]
fn recovered_paee_matches_truth_for_every_default_subject() {
    let cfg = GeneratorConfig::default();
    for i in 0..cfg.n_subjects {
        let g = generate_subject(&cfg, i).unwrap();
        let (p, truth) = prepared_with_truth(&g);
        let pair = EvaluationPair::new(p.paee.values().to_vec(), truth).unwrap();
        let r2 = r_squared(&pair).unwrap();
        assert!(r2 > 0.95, "{}: closure r2 {r2}", p.id);
    }
}

#[test]
fn zero_wrist_gain_leaves_only_gravity_at_the_wrists() {
    let mut cfg = GeneratorConfig::noiseless(5);
    for a in &mut cfg.protocol {
        a.wrist_gain = 0.0;
    }
    let g = generate_subject(&cfg, 0).unwrap();
    let (p, truth) = prepared_with_truth(&g);
    for loc in [SensorLocation::LeftWrist, SensorLocation::RightWrist] {
        let acc = &p.acc[&loc];
        let n = acc.len();
        for ch in acc.channels() {
            let peak = ch[n / 10..n - n / 10].iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(peak < 0.01, "{loc:?}: {peak}");
        }
    }
    let pelvis = &p.acc[&SensorLocation::Pelvis];
    let iaa: Vec<f64> = (0..pelvis.len())
        .map(|k| pelvis.channels().iter().map(|c| c[k].abs()).sum())
        .collect();
    let pair = EvaluationPair::new(iaa, truth).unwrap();
    // The pelvis envelope follows PAEE up to scale.
    let corr = pearson(pair.pred(), pair.truth());
    assert!(corr > 0.9, "pelvis/PAEE correlation {corr}");
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

#[test]
fn pelvis_iaa_is_monotone_in_paee_level_without_noise() {
    let cfg = GeneratorConfig {
        transition_tau: 1.0,
        ..GeneratorConfig::noiseless(3)
    };
    let g = generate_subject(&cfg, 0).unwrap();
    let (p, truth) = prepared_with_truth(&g);
    let pelvis = &p.acc[&SensorLocation::Pelvis];
    let mut per_activity: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for (k, label) in p.labels.iter().enumerate() {
        let Some(a) = cfg.protocol.iter().find(|a| &a.name == label) else {
            continue;
        };
        // Plateau seconds only; stair pauses and transitions are skipped.
        if (truth[k] - a.paee_level).abs() < 1e-3 * a.paee_level {
            let v = pelvis.channels().iter().map(|c| c[k].abs()).sum();
            per_activity.entry(a.name.clone()).or_default().push(v);
        }
    }
    let mut levels: Vec<(f64, f64, &str)> = cfg
        .protocol
        .iter()
        .map(|a| {
            let v = &per_activity[&a.name];
            (a.paee_level, v.iter().sum::<f64>() / v.len() as f64, a.name.as_str())
        })
        .collect();
    levels.sort_by(|a, b| a.0.total_cmp(&b.0));
    for w in levels.windows(2) {
        assert!(w[1].1 > w[0].1, "{:?} then {:?}", w[0], w[1]);
    }
}

#[test]
fn default_seed_gives_several_activity_orders() {
    let cfg = GeneratorConfig::default();
    let orders: BTreeSet<Vec<String>> = (0..cfg.n_subjects)
        .map(|i| generate_subject(&cfg, i).unwrap().order)
        .collect();
    assert!(orders.len() >= 2);
}

#[test]
fn large_gas_noise_is_clamped_and_counted() {
    let cfg = GeneratorConfig {
        gas_noise_sd: 5000.0,
        ..GeneratorConfig::default()
    };
    let g = generate_subject(&cfg, 0).unwrap();
    assert!(g.clamped > 0);
    let zeros = [&g.record.rest, &g.record.adl]
        .iter()
        .flat_map(|b| b.vo2().iter().chain(b.vco2()))
        .filter(|v| **v == 0.0)
        .count();
    assert!(zeros > 0 && zeros <= g.clamped);
}

fn tree(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for e in fs::read_dir(root).unwrap() {
        let p = e.unwrap().path();
        let name = p.strip_prefix(root).unwrap().display().to_string();
        if p.is_dir() {
            for (k, v) in tree(&p) {
                out.insert(format!("{name}/{k}"), v);
            }
        } else {
            out.insert(name, fs::read(&p).unwrap());
        }
    }
    out
}

#[test]
fn default_dataset_layout_and_determinism() {
    let cfg = GeneratorConfig::default();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let summary = generate_dataset(&cfg, a.path()).unwrap();
    generate_dataset(&cfg, b.path()).unwrap();
    assert_eq!(summary.subjects.len(), 9);
    let ta = tree(a.path());
    assert!(ta == tree(b.path()), "same seed must give identical trees");

    let ds = load_dataset(a.path()).unwrap();
    assert_eq!(ds.len(), 9);
    for s in ds.subjects() {
        let dir = a.path().join(s.id());
        let acc_files = fs::read_dir(&dir)
            .unwrap()
            .filter(|e| {
                let n = e.as_ref().unwrap().file_name();
                n.to_string_lossy().starts_with("acc_")
            })
            .count();
        assert_eq!(acc_files, 5);
        let truth = parse_truth_csv(&fs::read_to_string(dir.join(TRUTH_FILE)).unwrap()).unwrap();
        assert!(!truth.is_empty());
    }
    let manifest = fs::read_to_string(a.path().join(MANIFEST_FILE)).unwrap();
    assert!(manifest.contains("seed = 42"));
    assert!(manifest.contains("modeling assumption"));

    let other = tempfile::tempdir().unwrap();
    generate_dataset(&GeneratorConfig { seed: 43, ..cfg }, other.path()).unwrap();
    assert!(ta != tree(other.path()));
}

#[test]
fn two_subject_dataset_loads() {
    let cfg = GeneratorConfig {
        n_subjects: 2,
        ..GeneratorConfig::default()
    };
    let dir = tempfile::tempdir().unwrap();
    generate_dataset(&cfg, dir.path()).unwrap();
    let ds = load_dataset(dir.path()).unwrap();
    let ids: Vec<&str> = ds.subjects().iter().map(|s| s.id()).collect();
    assert_eq!(ids, ["S01", "S02"]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn generated_records_are_well_formed(seed in any::<u64>(), index in 0usize..20) {
        let cfg = GeneratorConfig { seed, ..GeneratorConfig::default() };
        let g = generate_subject(&cfg, index).unwrap();
        for b in [&g.record.rest, &g.record.adl] {
            prop_assert!(b.timestamps().windows(2).all(|w| w[1] > w[0]));
            prop_assert!(b.vo2().iter().chain(b.vco2()).all(|v| *v >= 0.0));
        }
        prop_assert!(g.record.rest.duration() >= 1800.0);
        let mut names: Vec<&str> = g.order.iter().map(String::as_str).collect();
        names.sort_unstable();
        let mut expected: Vec<&str> = cfg.protocol.iter().map(|a| a.name.as_str()).collect();
        expected.sort_unstable();
        prop_assert_eq!(names, expected);
        prop_assert!(g.truth.values.iter().all(|v| v.is_finite() && *v >= 0.0));
        for acc in g.record.acc.values() {
            prop_assert!(acc.timestamps().windows(2).all(|w| w[1] > w[0]));
        }
    }
}
