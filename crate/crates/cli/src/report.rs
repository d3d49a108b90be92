//! SVG trace plots and the Mean (SD) summary table.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use paee::evaluation::{nrmse, parse_trace_csv, r_squared, EvaluationPair, ModelKind, TracePoint};
use paee::features::Composition;

use crate::CliError;

pub const SUMMARY_FILE: &str = "summary.md";

/// Row order of the summary table.
const TABLE_ORDER: [Composition; 4] = [
    Composition::PelvisAcc,
    Composition::ThreeAcc,
    Composition::RightWristAcc,
    Composition::LeftWristAcc,
];

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub start_s: f64,
    pub end_s: f64,
    pub label: String,
}

/// `(composition, model, subject)` from `trace_<comp>_<model>_<subject>.csv`.
pub fn parse_trace_name(name: &str) -> Option<(Composition, ModelKind, String)> {
    let stem = name.strip_prefix("trace_")?.strip_suffix(".csv")?;
    let mut parts = stem.splitn(3, '_');
    let comp = parts.next()?.parse().ok()?;
    let model = parts.next()?.parse().ok()?;
    let subject = parts.next().filter(|s| !s.is_empty())?;
    Some((comp, model, subject.to_string()))
}

pub fn parse_segments(text: &str) -> Result<Vec<Segment>, String> {
    text.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| {
            let mut f = l.splitn(3, ',');
            let mut num = || -> Result<f64, String> {
                f.next()
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| format!("segments line {}", i + 2))
            };
            let (start_s, end_s) = (num()?, num()?);
            let label = f.next().unwrap_or("").to_string();
            Ok(Segment {
                start_s,
                end_s,
                label,
            })
        })
        .collect()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn polyline(points: impl Iterator<Item = (f64, f64)>) -> String {
    let mut s = String::new();
    for (i, (x, y)) in points.enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{x:.1},{y:.1}");
    }
    s
}

pub fn trace_svg(title: &str, trace: &[TracePoint], segments: &[Segment]) -> String {
    let t0 = trace.first().map_or(0.0, |p| p.t_s);
    let t1 = trace.last().map_or(1.0, |p| p.t_s).max(t0 + 1.0);
    let y_max = trace
        .iter()
        .flat_map(|p| [p.truth, p.pred])
        .filter(|v| v.is_finite())
        .fold(0.0f64, f64::max)
        .max(0.1)
        * 1.05;
    let y_min = trace
        .iter()
        .flat_map(|p| [p.truth, p.pred])
        .filter(|v| v.is_finite())
        .fold(0.0f64, f64::min);
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let x = |t: f64| LEFT + (t - t0) / (t1 - t0) * pw;
    let y = |v: f64| TOP + (y_max - v) / (y_max - y_min) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{LEFT}" y="20" font-size="14">{}</text>"#,
        escape(title)
    );
    let _ = writeln!(
        s,
        r##"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#888"/>"##
    );
    for k in 0..=4 {
        let v = y_min + (y_max - y_min) * k as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{v:.1}</text>"#,
            LEFT - 6.0,
            y(v) + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="14" y="{:.1}" transform="rotate(-90 14 {:.1})" text-anchor="middle">PAEE (W/kg)</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">time (s)</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 10.0
    );
    for (t, anchor) in [(t0, "start"), (t1, "end")] {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="{anchor}">{t:.0}</text>"#,
            x(t),
            TOP + ph + 16.0
        );
    }
    let _ = writeln!(s, r#"<g class="activities">"#);
    for seg in segments.iter().filter(|g| g.start_s >= t0 && g.start_s <= t1) {
        let xs = x(seg.start_s);
        let _ = writeln!(
            s,
            r##"<line x1="{xs:.1}" y1="{TOP}" x2="{xs:.1}" y2="{:.1}" stroke="#aaa" stroke-dasharray="4 3"/>"##,
            TOP + ph
        );
        let _ = writeln!(
            s,
            r##"<text x="{:.1}" y="{:.1}" transform="rotate(90 {:.1} {:.1})" fill="#666" font-size="9">{}</text>"##,
            xs + 3.0,
            TOP + 4.0,
            xs + 3.0,
            TOP + 4.0,
            escape(&seg.label)
        );
    }
    let _ = writeln!(s, "</g>");
    let series = [
        ("ground truth", "#222222", true),
        ("prediction", "#d62728", false),
    ];
    for (i, (label, colour, is_truth)) in series.into_iter().enumerate() {
        let pts = polyline(
            trace
                .iter()
                .map(|p| (x(p.t_s), y(if is_truth { p.truth } else { p.pred }))),
        );
        let _ = writeln!(
            s,
            r#"<polyline class="series" data-label="{label}" fill="none" stroke="{colour}" stroke-width="1.2" points="{pts}"/>"#
        );
        let lx = WIDTH - RIGHT - 200.0 + i as f64 * 100.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="22" x2="{}" y2="22" stroke="{colour}" stroke-width="2"/><text x="{}" y="26">{label}</text>"#,
            lx + 18.0,
            lx + 22.0
        );
    }
    s.push_str("</svg>\n");
    s
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Mean (SD) over subjects of every cell present, in the results-table
/// layout: models in turn, compositions pelvis, 3-acc, right wrist, left
/// wrist. Values are `(nrmse, r2)` per subject.
pub fn summary_table(cells: &BTreeMap<(ModelKind, Composition), Vec<(f64, f64)>>) -> String {
    let mut s = String::from(
        "| Accelerometer composition | Model | NRMSE Mean (SD) | R² Mean (SD) | n |\n|---|---|---|---|---|\n",
    );
    for model in ModelKind::ALL {
        for comp in TABLE_ORDER {
            let Some(v) = cells.get(&(model, comp)) else {
                continue;
            };
            let e: Vec<f64> = v.iter().map(|p| p.0).collect();
            let r: Vec<f64> = v.iter().map(|p| p.1).collect();
            let (em, es) = mean_sd(&e);
            let (rm, rs) = mean_sd(&r);
            let _ = writeln!(
                s,
                "| {} | {} | {em:.2} ({es:.2}) | {rm:.2} ({rs:.2}) | {} |",
                comp.name(),
                model.name(),
                v.len()
            );
        }
    }
    s
}

/// Writes one SVG per trace file plus the summary table. Returns the number
/// of plots.
pub fn render(traces: &Path, out: &Path) -> Result<usize, CliError> {
    let entries = fs::read_dir(traces).map_err(|e| CliError::io(traces, e))?;
    let mut found = Vec::new();
    for e in entries {
        let e = e.map_err(|e| CliError::io(traces, e))?;
        let name = e.file_name().to_string_lossy().into_owned();
        if let Some(key) = parse_trace_name(&name) {
            found.push((key, e.path()));
        }
    }
    if found.is_empty() {
        return Err(CliError::io(traces, "no trace files"));
    }
    found.sort();
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let mut segments: BTreeMap<String, Vec<Segment>> = BTreeMap::new();
    let mut cells: BTreeMap<(ModelKind, Composition), Vec<(f64, f64)>> = BTreeMap::new();
    for ((comp, model, subject), path) in &found {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let trace = parse_trace_csv(&text).map_err(|e| CliError::io(path, e))?;
        if !segments.contains_key(subject) {
            let p = traces.join(format!("segments_{subject}.csv"));
            let segs = if p.exists() {
                let t = fs::read_to_string(&p).map_err(|e| CliError::io(&p, e))?;
                parse_segments(&t).map_err(|e| CliError::io(&p, e))?
            } else {
                Vec::new()
            };
            segments.insert(subject.clone(), segs);
        }
        let title = format!("{subject} {} {}", comp.name(), model.name());
        let svg = trace_svg(&title, &trace, &segments[subject]);
        let svg_path = out.join(format!("plot_{}_{}_{subject}.svg", comp.name(), model.slug()));
        fs::write(&svg_path, svg).map_err(|e| CliError::io(&svg_path, e))?;

        let pair = EvaluationPair::new(
            trace.iter().map(|p| p.pred).collect(),
            trace.iter().map(|p| p.truth).collect(),
        );
        match pair.and_then(|p| Ok((nrmse(&p)?, r_squared(&p)?))) {
            Ok(m) => cells.entry((*model, *comp)).or_default().push(m),
            Err(e) => log::warn!("{}: no metrics: {e}", path.display()),
        }
    }
    let table = out.join(SUMMARY_FILE);
    fs::write(&table, summary_table(&cells)).map_err(|e| CliError::io(&table, e))?;
    Ok(found.len())
}
