use std::collections::BTreeMap;
use std::fs;

use paee::data::{load_dataset, SensorLocation, UniformSeries, UniformTriaxial};
use paee::energetics::PaeeSeries;
use paee::evaluation::{
    loso, loso_prepared, loso_with_models, subject_windows, train_fold, LosoConfig, ModelKind,
};
use paee::features::{iaa_tot, Composition, WindowSpec};
use paee::models::TrainConfig;
use paee::preprocess::{prepare_dataset, PreparedSubject};
use paee::synthgen::{generate_dataset, GeneratorConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Subject whose PAEE one second after every window is an exact linear
/// function of that window's pelvis IAA_tot.
fn linear_subject(id: &str, seed: u64, n: usize) -> PreparedSubject {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut level = 0.0;
    let mut channel = || -> Vec<f64> { (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect() };
    let mut acc = BTreeMap::new();
    for loc in SensorLocation::ALL {
        let mut ch = [channel(), channel(), channel()];
        if loc == SensorLocation::Pelvis {
            // Slowly varying intensity so the target spans a wide range.
            for k in 0..n {
                if k % 90 == 0 {
                    level = ((k / 90) % 5) as f64 * 0.8 + 0.1;
                }
                for c in ch.iter_mut() {
                    c[k] *= level;
                }
            }
        }
        let [x, y, z] = ch;
        acc.insert(loc, UniformTriaxial::new(0.0, 1.0, x, y, z).unwrap());
    }
    let w = WindowSpec::default().width;
    let [x, y, z] = acc[&SensorLocation::Pelvis].channels().clone();
    let mut paee = vec![0.0; n];
    for t in w..n {
        paee[t] = 0.05 * iaa_tot(&x[t - w..t], &y[t - w..t], &z[t - w..t]) + 0.3;
    }
    PreparedSubject {
        id: id.to_string(),
        mass_kg: 70.0,
        acc,
        paee: PaeeSeries(UniformSeries::new(0.0, 1.0, paee)),
        labels: vec!["a".to_string(); n],
    }
}

fn small_cnn() -> LosoConfig {
    LosoConfig {
        train: TrainConfig {
            epochs: 1,
            ..TrainConfig::default()
        },
        train_stride: 8,
        ..LosoConfig::default()
    }
}

#[test]
fn linear_pelvis_target_is_recovered_in_every_fold() {
    let subjects: Vec<_> = (0..4)
        .map(|i| linear_subject(&format!("P{i}"), i as u64, 600))
        .collect();
    let r = loso_prepared(&subjects, Composition::PelvisAcc, ModelKind::Lr, &LosoConfig::default())
        .unwrap();
    assert_eq!(r.folds.len(), 4);
    for f in &r.folds {
        assert!(f.r2 > 0.99, "{}: r2 {}", f.subject, f.r2);
    }
}

#[test]
fn two_subjects_train_on_each_other() {
    let subjects = vec![linear_subject("A", 1, 400), linear_subject("B", 2, 400)];
    let cfg = LosoConfig::default();
    let (r, models) =
        loso_with_models(&subjects, Composition::ThreeAcc, ModelKind::Lr, &cfg).unwrap();
    assert_eq!(r.subjects(), vec!["A", "B"]);
    let only_b = subject_windows(&subjects[1..], Composition::ThreeAcc, cfg.window);
    let direct = train_fold(&only_b, "A", Composition::ThreeAcc, ModelKind::Lr, &cfg).unwrap();
    assert_eq!(models[0].0, "A");
    assert_eq!(models[0].1.to_text(), direct.to_text());
    assert!(loso_prepared(&subjects[..1], Composition::ThreeAcc, ModelKind::Lr, &cfg).is_err());
}

#[test]
fn fold_failures_do_not_stop_other_folds() {
    let mut subjects: Vec<_> = (0..3)
        .map(|i| linear_subject(&format!("P{i}"), i as u64, 300))
        .collect();
    subjects[1] = linear_subject("P1", 9, 20);
    let r = loso_prepared(&subjects, Composition::PelvisAcc, ModelKind::Lr, &LosoConfig::default())
        .unwrap();
    assert_eq!(r.subjects(), vec!["P0", "P2"]);
    assert_eq!(r.failures.len(), 1);
    assert_eq!(r.failures[0].subject, "P1");
}

fn small_generator(n: usize) -> GeneratorConfig {
    let mut cfg = GeneratorConfig {
        n_subjects: n,
        seed: 11,
        ..GeneratorConfig::default()
    };
    cfg.protocol.truncate(4);
    cfg
}

#[test]
fn held_out_files_do_not_influence_the_fold_model() {
    let dir = tempfile::tempdir().unwrap();
    generate_dataset(&small_generator(3), dir.path()).unwrap();
    let full = load_dataset(dir.path()).unwrap();
    let prepared: Vec<_> = prepare_dataset(&full).into_iter().map(Result::unwrap).collect();
    for model in ModelKind::ALL {
        let cfg = small_cnn();
        let (_, models) =
            loso_with_models(&prepared, Composition::ThreeAcc, model, &cfg).unwrap();
        let (held_out, art) = &models[1];
        assert_eq!(held_out, "S02");

        let pruned = tempfile::tempdir().unwrap();
        for id in ["S01", "S03"] {
            let to = pruned.path().join(id);
            fs::create_dir(&to).unwrap();
            for e in fs::read_dir(dir.path().join(id)).unwrap() {
                let e = e.unwrap();
                fs::copy(e.path(), to.join(e.file_name())).unwrap();
            }
        }
        let rest = load_dataset(pruned.path()).unwrap();
        let rest: Vec<_> = prepare_dataset(&rest).into_iter().map(Result::unwrap).collect();
        let windows = subject_windows(&rest, Composition::ThreeAcc, cfg.window);
        let again = train_fold(&windows, "S02", Composition::ThreeAcc, model, &cfg).unwrap();
        assert_eq!(art.to_text(), again.to_text(), "{model}");
    }
}

#[test]
fn full_grid_shares_subject_order() {
    let dir = tempfile::tempdir().unwrap();
    generate_dataset(&small_generator(3), dir.path()).unwrap();
    let ds = load_dataset(dir.path()).unwrap();
    let cfg = small_cnn();
    let mut cells = Vec::new();
    for comp in Composition::ALL {
        for model in ModelKind::ALL {
            cells.push(loso(&ds, comp, model, &cfg).unwrap());
        }
    }
    assert_eq!(cells.len(), 8);
    for c in &cells {
        assert_eq!(c.subjects(), vec!["S01", "S02", "S03"]);
        assert!(c.failures.is_empty());
        for f in &c.folds {
            assert!(f.nrmse.is_finite() && f.r2.is_finite() && f.r2 <= 1.0);
            assert!(!f.trace.is_empty());
        }
    }
}
