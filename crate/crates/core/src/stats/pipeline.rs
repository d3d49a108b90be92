use std::fmt::{self, Write as _};

use super::shapiro::shapiro_wilk;
use super::tests::{bonferroni, paired_t, rm_anova_table, AnovaTable, MetricMatrix};
use super::{StatsError, TestFlag, TestResult};
use crate::evaluation::{ExperimentResult, ModelKind};
use crate::features::Composition;

/// Number of pairwise composition comparisons corrected for together.
pub const BONFERRONI_FAMILY: usize = 6;
pub const SIGNIFICANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Nrmse,
    R2,
}

impl Metric {
    pub const ALL: [Metric; 2] = [Metric::Nrmse, Metric::R2];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Nrmse => "NRMSE",
            Metric::R2 => "R2",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    Composition,
    Model,
}

impl Factor {
    pub fn name(self) -> &'static str {
        match self {
            Factor::Composition => "composition",
            Factor::Model => "model",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalityRow {
    pub composition: Composition,
    pub model: ModelKind,
    pub metric: Metric,
    pub result: Result<TestResult, StatsError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnovaRow {
    pub factor: Factor,
    pub metric: Metric,
    pub table: AnovaTable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairRow {
    pub metric: Metric,
    pub a: Composition,
    pub b: Composition,
    pub t: f64,
    pub p_raw: f64,
    pub p_adj: f64,
    pub flag: Option<TestFlag>,
}

impl PairRow {
    pub fn significant(&self) -> bool {
        self.p_adj < SIGNIFICANCE
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatsReport {
    pub subjects: Vec<String>,
    pub normality: Vec<NormalityRow>,
    pub anova: Vec<AnovaRow>,
    pub pairwise: Vec<PairRow>,
}

impl StatsReport {
    /// The comparison of `a` and `b` in either order.
    pub fn pair(&self, metric: Metric, a: Composition, b: Composition) -> Option<&PairRow> {
        self.pairwise.iter().find(|r| {
            r.metric == metric && ((r.a == a && r.b == b) || (r.a == b && r.b == a))
        })
    }

    pub fn anova(&self, factor: Factor, metric: Metric) -> Option<&AnovaTable> {
        self.anova
            .iter()
            .find(|r| r.factor == factor && r.metric == metric)
            .map(|r| &r.table)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "subjects: {}", self.subjects.join(" "));
        let _ = writeln!(out);
        let _ = writeln!(out, "[shapiro-wilk]");
        let _ = writeln!(
            out,
            "{:<12} {:<9} {:<6} {:>10} {:>12} {:>7}",
            "composition", "model", "metric", "W", "p", "normal"
        );
        for r in &self.normality {
            match &r.result {
                Ok(t) => {
                    let _ = writeln!(
                        out,
                        "{:<12} {:<9} {:<6} {:>10.6} {:>12.4e} {:>7}",
                        r.composition.name(),
                        r.model.name(),
                        r.metric.name(),
                        t.statistic,
                        t.p,
                        if t.p > SIGNIFICANCE { "yes" } else { "no" }
                    );
                }
                Err(e) => {
                    let _ = writeln!(
                        out,
                        "{:<12} {:<9} {:<6} n/a ({e})",
                        r.composition.name(),
                        r.model.name(),
                        r.metric.name()
                    );
                }
            }
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "[rm-anova]");
        let _ = writeln!(
            out,
            "{:<12} {:<6} {:<11} {:>12} {:>4} {:>12} {:>12} {:>12}",
            "factor", "metric", "source", "SS", "df", "MS", "F", "p"
        );
        for r in &self.anova {
            let t = &r.table;
            let note = match t.flag {
                Some(TestFlag::ZeroErrorVariance) => "  (zero error variance)",
                _ => "",
            };
            let _ = writeln!(
                out,
                "{:<12} {:<6} {:<11} {:>12.6e} {:>4} {:>12.6e} {:>12.6e} {:>12.4e}{note}",
                r.factor.name(),
                r.metric.name(),
                "conditions",
                t.ss_conditions,
                t.df_conditions,
                t.ms_conditions,
                t.f,
                t.p
            );
            let _ = writeln!(
                out,
                "{:<12} {:<6} {:<11} {:>12.6e} {:>4} {:>12.6e}",
                r.factor.name(),
                r.metric.name(),
                "error",
                t.ss_error,
                t.df_error,
                t.ms_error
            );
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "[paired-t bonferroni m={BONFERRONI_FAMILY}]");
        let _ = writeln!(
            out,
            "{:<6} {:<26} {:>10} {:>12} {:>12} {:>11}",
            "metric", "pair", "t", "p_raw", "p_adj", "significant"
        );
        for r in &self.pairwise {
            let _ = writeln!(
                out,
                "{:<6} {:<26} {:>10.4} {:>12.4e} {:>12.4e} {:>11}",
                r.metric.name(),
                format!("{} vs {}", r.a.name(), r.b.name()),
                r.t,
                r.p_raw,
                r.p_adj,
                if r.significant() { "yes" } else { "no" }
            );
        }
        out
    }
}

/// Per-subject values of one cell, in subject order.
fn cell_values<'a>(
    results: &'a [ExperimentResult],
    comp: Composition,
    model: ModelKind,
) -> Option<&'a ExperimentResult> {
    let mut it = results
        .iter()
        .filter(|r| r.composition == comp && r.model == model);
    let first = it.next()?;
    if it.next().is_some() {
        return None;
    }
    Some(first)
}

fn metric_of(r: &ExperimentResult, m: Metric) -> Vec<f64> {
    r.folds
        .iter()
        .map(|f| match m {
            Metric::Nrmse => f.nrmse,
            Metric::R2 => f.r2,
        })
        .collect()
}

/// Normality per cell, RM-ANOVA per factor (averaging over the other
/// factor) and Bonferroni-corrected paired t-tests between compositions
/// (model-averaged), for both metrics.
pub fn analysis_pipeline(results: &[ExperimentResult]) -> Result<StatsReport, StatsError> {
    let mut grid = Vec::new();
    let mut subjects: Option<Vec<String>> = None;
    for comp in Composition::ALL {
        for model in ModelKind::ALL {
            let cell = cell_values(results, comp, model).ok_or_else(|| {
                StatsError::IncompleteGrid(format!(
                    "need exactly one {} / {} cell",
                    comp.name(),
                    model.name()
                ))
            })?;
            if !cell.failures.is_empty() {
                return Err(StatsError::IncompleteGrid(format!(
                    "{} / {} has {} failed fold(s)",
                    comp.name(),
                    model.name(),
                    cell.failures.len()
                )));
            }
            let ids: Vec<String> = cell.folds.iter().map(|f| f.subject.clone()).collect();
            match &subjects {
                None => subjects = Some(ids),
                Some(s) if *s != ids => {
                    return Err(StatsError::IncompleteGrid(format!(
                        "{} / {} covers a different subject set",
                        comp.name(),
                        model.name()
                    )))
                }
                Some(_) => {}
            }
            grid.push(cell);
        }
    }
    let subjects = subjects.unwrap_or_default();
    let n = subjects.len();
    let nm = ModelKind::ALL.len();
    let nc = Composition::ALL.len();
    let at = |c: usize, m: usize| grid[c * nm + m];

    let mut normality = Vec::new();
    for metric in Metric::ALL {
        for (c, comp) in Composition::ALL.into_iter().enumerate() {
            for (m, model) in ModelKind::ALL.into_iter().enumerate() {
                normality.push(NormalityRow {
                    composition: comp,
                    model,
                    metric,
                    result: shapiro_wilk(&metric_of(at(c, m), metric)),
                });
            }
        }
    }

    let mut anova = Vec::new();
    let mut pairwise = Vec::new();
    for metric in Metric::ALL {
        let values: Vec<Vec<Vec<f64>>> = (0..nc)
            .map(|c| (0..nm).map(|m| metric_of(at(c, m), metric)).collect())
            .collect();
        let by_comp: Vec<Vec<f64>> = (0..nc)
            .map(|c| {
                (0..n)
                    .map(|s| (0..nm).map(|m| values[c][m][s]).sum::<f64>() / nm as f64)
                    .collect()
            })
            .collect();
        let by_model: Vec<Vec<f64>> = (0..nm)
            .map(|m| {
                (0..n)
                    .map(|s| (0..nc).map(|c| values[c][m][s]).sum::<f64>() / nc as f64)
                    .collect()
            })
            .collect();
        let rows = |cols: &[Vec<f64>]| -> Vec<Vec<f64>> {
            (0..n).map(|s| cols.iter().map(|c| c[s]).collect()).collect()
        };
        anova.push(AnovaRow {
            factor: Factor::Composition,
            metric,
            table: rm_anova_table(&MetricMatrix::new(rows(&by_comp))?)?,
        });
        anova.push(AnovaRow {
            factor: Factor::Model,
            metric,
            table: rm_anova_table(&MetricMatrix::new(rows(&by_model))?)?,
        });

        let mut pairs = Vec::new();
        for i in 0..nc {
            for j in i + 1..nc {
                pairs.push((i, j, paired_t(&by_comp[i], &by_comp[j])?));
            }
        }
        debug_assert_eq!(pairs.len(), BONFERRONI_FAMILY);
        let raw: Vec<f64> = pairs.iter().map(|p| p.2.p).collect();
        let adj = bonferroni(&raw)?;
        for ((i, j, t), p_adj) in pairs.into_iter().zip(adj) {
            pairwise.push(PairRow {
                metric,
                a: Composition::ALL[i],
                b: Composition::ALL[j],
                t: t.statistic,
                p_raw: t.p,
                p_adj,
                flag: t.flag,
            });
        }
    }
    Ok(StatsReport {
        subjects,
        normality,
        anova,
        pairwise,
    })
}
