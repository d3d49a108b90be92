//! Generates the synthetic dataset in memory and prints the closure R² of
//! every subject and the mean LOSO R² of each grid cell.
//!
//! `cargo run --release -p paee-core --example calibrate -- cnn=1 epochs=3 stride=4`
//!
//! Arguments are `key=value`: `cnn`, `epochs`, `stride`, `lr`, `comps` or any
//! generator key.

use std::time::Instant;

use paee::evaluation::{loso_prepared, r_squared, EvaluationPair, LosoConfig, ModelKind};
use paee::features::Composition;
use paee::preprocess::prepare_subject;
use paee::synthgen::{generate_subject, GeneratorConfig};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let mut cfg = GeneratorConfig::default();
    let mut models = vec![ModelKind::Lr];
    let mut lcfg = LosoConfig::default();
    let mut comps = Composition::ALL.to_vec();
    for a in &args {
        let (k, v) = a.split_once('=').expect("key=value");
        match k {
            "cnn" => models.push(ModelKind::CnnLstm),
            "epochs" => lcfg.train.epochs = v.parse().unwrap(),
            "stride" => lcfg.train_stride = v.parse().unwrap(),
            "comps" => comps = v.split(',').map(|c| c.parse().unwrap()).collect(),
            "thigh_eq" => cfg.protocol.iter_mut().for_each(|a| a.thigh_gain = a.com_gain),
            "lr" => lcfg.train.learning_rate = v.parse().unwrap(),
            _ => cfg.set(k, v).unwrap(),
        }
    }
    let t0 = Instant::now();
    let subjects: Vec<_> = (0..cfg.n_subjects)
        .map(|i| {
            let g = generate_subject(&cfg, i).unwrap();
            let p = prepare_subject(&g.record).unwrap();
            let k0 = (p.paee.series().start - g.truth.start) as usize;
            let truth = g.truth.values[k0..k0 + p.paee.values().len()].to_vec();
            let r2 = r_squared(&EvaluationPair::new(p.paee.values().to_vec(), truth).unwrap()).unwrap();
            println!("{} closure r2 {r2:.4} clamped {} n {}", p.id, g.clamped, p.paee.values().len());
            p
        })
        .collect();
    println!("generate+prepare {:.1}s", t0.elapsed().as_secs_f64());
    for m in models {
        for &comp in &comps {
            let t = Instant::now();
            let r = loso_prepared(&subjects, comp, m, &lcfg).unwrap();
            let r2: Vec<String> = r.folds.iter().map(|f| format!("{:.2}", f.r2)).collect();
            println!(
                "{:>12} {:>8} mean r2 {:.3} nrmse {:.3} [{}] {:.1}s",
                comp.name(),
                m.name(),
                r.mean_r2(),
                r.mean_nrmse(),
                r2.join(" "),
                t.elapsed().as_secs_f64()
            );
        }
    }
}
