//! Normality testing, repeated-measures ANOVA, paired t-tests with
//! Bonferroni correction, and the special functions behind their p-values.

mod pipeline;
mod shapiro;
mod special;
mod tests;

use thiserror::Error;

pub use pipeline::{
    analysis_pipeline, AnovaRow, Factor, Metric, NormalityRow, PairRow, StatsReport,
    BONFERRONI_FAMILY, SIGNIFICANCE,
};
pub use shapiro::{shapiro_wilk, sw_coefficients, SW_MAX_N, SW_MIN_N};
pub use special::{f_sf, reg_inc_beta, t_sf_two_sided};
pub use tests::{bonferroni, paired_t, rm_anova_oneway, rm_anova_table, AnovaTable, MetricMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("sample size {n} outside {min}..={max}")]
    SampleSizeOutOfRange { n: usize, min: usize, max: usize },
    #[error("sample is constant")]
    ConstantSample,
    #[error("samples differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least {needed} subjects, got {got}")]
    TooFewSubjects { needed: usize, got: usize },
    #[error("malformed metric matrix: {0}")]
    BadMatrix(String),
    #[error("incomplete results grid: {0}")]
    IncompleteGrid(String),
}

/// Marks results whose statistic is undefined and whose p was set by
/// convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestFlag {
    /// Paired differences have zero variance: p = 0 if they are a nonzero
    /// constant, p = 1 if they are all zero.
    ZeroVariance,
    /// ANOVA error sum of squares is zero: p = 0 if conditions differ,
    /// p = 1 otherwise.
    ZeroErrorVariance,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestResult {
    pub statistic: f64,
    pub df: (f64, Option<f64>),
    pub p: f64,
    pub flag: Option<TestFlag>,
}

impl TestResult {
    pub(crate) fn with_df1(statistic: f64, df: f64, p: f64) -> Self {
        TestResult {
            statistic,
            df: (df, None),
            p,
            flag: None,
        }
    }
}
