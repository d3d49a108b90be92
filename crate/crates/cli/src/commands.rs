use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use paee::data::load_dataset;
use paee::evaluation::{
    loso_with_models, parse_results_csv, trace_file_name, write_failures_csv, write_results_csv,
    write_trace_csv, ExperimentResult, FoldFailure, R2Variant,
};
use paee::preprocess::{prepare_dataset, PrepareError, PreparedSubject};
use paee::stats::{analysis_pipeline, StatsError};
use paee::synthgen::generate_dataset;

use crate::config::{generator_config, parse_list, read_config, run_settings as settings_from, RunSettings};
use crate::report;
use crate::{CliError, Outcome, RunFlags};

pub const RESULTS_FILE: &str = "results.csv";
pub const FAILURES_FILE: &str = "failures.csv";
pub const STATS_FILE: &str = "stats.txt";
pub const TRACES_DIR: &str = "traces";
pub const MODELS_DIR: &str = "models";

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}

pub fn synth(config: Option<&Path>, seed: Option<u64>, out: &Path) -> Result<(), CliError> {
    let mut cfg = generator_config(&read_config(config)?)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let summary = generate_dataset(&cfg, out).map_err(|e| match e {
        paee::synthgen::SynthError::ConfigInvalid(m) => CliError::Config(m),
        other => CliError::Io(other.to_string()),
    })?;
    println!(
        "wrote {} subjects to {} (seed {}, {} clamped gas samples)",
        summary.subjects.len(),
        out.display(),
        cfg.seed,
        summary.clamped()
    );
    for s in &summary.subjects {
        println!("{}: {}", s.id, s.order.join(" | "));
    }
    Ok(())
}

/// Config file entries, then `--seed`, then the remaining flags.
pub fn run_settings(
    config: Option<&Path>,
    seed: Option<u64>,
    flags: &RunFlags,
) -> Result<RunSettings, CliError> {
    let mut s = settings_from(&read_config(config)?)?;
    if let Some(v) = seed {
        s.seed = v;
    }
    if let Some(v) = &flags.compositions {
        s.compositions = parse_list(v)?;
    }
    if let Some(v) = &flags.models {
        s.models = parse_list(v)?;
    }
    let numeric = [
        (&mut s.epochs, flags.epochs),
        (&mut s.batch_size, flags.batch_size),
        (&mut s.train_stride, flags.train_stride),
        (&mut s.window, flags.window),
        (&mut s.horizon, flags.horizon),
    ];
    for (field, v) in numeric {
        if let Some(v) = v {
            *field = v;
        }
    }
    if let Some(v) = flags.learning_rate {
        s.learning_rate = v;
    }
    if flags.literal_r2 {
        s.r2 = R2Variant::Literal;
    }
    s.compositions.dedup();
    s.models.dedup();
    s.validate()?;
    Ok(s)
}

fn prepare_failure(e: &PrepareError) -> FoldFailure {
    let subject = match e {
        PrepareError::Dsp { subject, .. }
        | PrepareError::Energetics { subject, .. }
        | PrepareError::Data { subject, .. } => subject.clone(),
    };
    FoldFailure {
        subject,
        reason: e.to_string(),
    }
}

fn segments_csv(s: &PreparedSubject) -> String {
    let mut out = String::from("start_s,end_s,label\n");
    for seg in s.segments() {
        let _ = writeln!(out, "{},{},{}", seg.start_s, seg.end_s, seg.label);
    }
    out
}

pub fn run(data: &Path, out: &Path, s: &RunSettings) -> Result<Outcome, CliError> {
    if !data.is_dir() {
        return Err(CliError::io(data, "not a directory"));
    }
    let ds = load_dataset(data).map_err(|e| CliError::io(data, e))?;
    let mut prepared = Vec::new();
    let mut excluded = Vec::new();
    for r in prepare_dataset(&ds) {
        match r {
            Ok(p) => prepared.push(p),
            Err(e) => {
                log::warn!("excluded: {e}");
                excluded.push(prepare_failure(&e));
            }
        }
    }
    let traces = out.join(TRACES_DIR);
    let models = out.join(MODELS_DIR);
    create_dir(&traces)?;
    create_dir(&models)?;
    for p in &prepared {
        write(&traces.join(format!("segments_{}.csv", p.id)), &segments_csv(p))?;
    }
    let cfg = s.loso();
    let mut results = Vec::new();
    for &comp in &s.compositions {
        for &model in &s.models {
            log::info!("{} {}", comp.name(), model.name());
            let (mut r, artifacts) = match loso_with_models(&prepared, comp, model, &cfg) {
                Ok(v) => v,
                Err(e) => {
                    let failures = prepared
                        .iter()
                        .map(|p| FoldFailure {
                            subject: p.id.clone(),
                            reason: e.to_string(),
                        })
                        .collect();
                    let r = ExperimentResult {
                        composition: comp,
                        model,
                        folds: Vec::new(),
                        failures,
                    };
                    (r, Vec::new())
                }
            };
            for f in &r.failures {
                log::warn!("{} {} {}: {}", comp.name(), model.name(), f.subject, f.reason);
            }
            r.failures.extend(excluded.iter().cloned());
            r.failures.sort_by(|a, b| a.subject.cmp(&b.subject));
            for f in &r.folds {
                log::info!("  {} nrmse {:.3} r2 {:.3}", f.subject, f.nrmse, f.r2);
                let name = trace_file_name(comp, model, &f.subject);
                write(&traces.join(name), &write_trace_csv(&f.trace))?;
            }
            for (subject, art) in &artifacts {
                let name = format!("model_{}_{}_{subject}.txt", comp.name(), model.slug());
                write(&models.join(name), &art.to_text())?;
            }
            results.push(r);
        }
    }
    write(&out.join(RESULTS_FILE), &write_results_csv(&results))?;
    let failures_path = out.join(FAILURES_FILE);
    if results.iter().any(|r| !r.failures.is_empty()) {
        write(&failures_path, &write_failures_csv(&results))?;
        log::warn!("fold failures listed in {}", failures_path.display());
        Ok(Outcome::Partial)
    } else {
        if failures_path.exists() {
            fs::remove_file(&failures_path).map_err(|e| CliError::io(&failures_path, e))?;
        }
        Ok(Outcome::Complete)
    }
}

pub fn stats(results: &Path, out: &Path) -> Result<(), CliError> {
    let text = fs::read_to_string(results).map_err(|e| CliError::io(results, e))?;
    let parsed = parse_results_csv(&text).map_err(|e| CliError::io(results, e))?;
    let report = analysis_pipeline(&parsed).map_err(|e| match e {
        StatsError::IncompleteGrid(m) => CliError::IncompleteGrid(format!("incomplete grid: {m}")),
        other => CliError::IncompleteGrid(format!("results not analysable: {other}")),
    })?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        create_dir(dir)?;
    }
    write(out, &report.to_text())?;
    println!("wrote {}", out.display());
    Ok(())
}

pub fn report(traces: &Path, out: &Path) -> Result<(), CliError> {
    let n = report::render(traces, out)?;
    println!("wrote {n} plots and the summary table to {}", out.display());
    Ok(())
}

pub fn all(
    config: Option<&Path>,
    seed: Option<u64>,
    flags: &RunFlags,
    out: &Path,
) -> Result<Outcome, CliError> {
    let settings = run_settings(config, seed, flags)?;
    let data = out.join("data");
    synth(config, seed, &data)?;
    let outcome = run(&data, out, &settings)?;
    report(&out.join(TRACES_DIR), &out.join("report"))?;
    if outcome == Outcome::Partial {
        log::warn!("skipping stats: the grid has failed folds");
        return Ok(outcome);
    }
    stats(&out.join(RESULTS_FILE), &out.join(STATS_FILE))?;
    Ok(outcome)
}
