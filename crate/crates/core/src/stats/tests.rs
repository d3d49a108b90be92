use super::special::{f_sf, t_sf_two_sided};
use super::{StatsError, TestFlag, TestResult};

/// Differences at or below this fraction of their magnitude count as zero
/// variance.
const ZERO_VARIANCE_REL: f64 = 1e-12;

/// Paired two-sided t-test on `d = a - b`.
pub fn paired_t(a: &[f64], b: &[f64]) -> Result<TestResult, StatsError> {
    if a.len() != b.len() {
        return Err(StatsError::LengthMismatch(a.len(), b.len()));
    }
    let n = a.len();
    if n < 2 {
        return Err(StatsError::SampleSizeOutOfRange { n, min: 2, max: usize::MAX });
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    if d.iter().any(|v| !v.is_finite()) {
        return Err(StatsError::Domain("non-finite difference".into()));
    }
    let nf = n as f64;
    let mean = d.iter().sum::<f64>() / nf;
    let var = d.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (nf - 1.0);
    let sd = var.sqrt();
    let df = nf - 1.0;
    let scale = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if sd <= ZERO_VARIANCE_REL * scale || scale == 0.0 {
        let (t, p) = if scale == 0.0 {
            (0.0, 1.0)
        } else {
            (f64::INFINITY.copysign(mean), 0.0)
        };
        return Ok(TestResult {
            statistic: t,
            df: (df, None),
            p,
            flag: Some(TestFlag::ZeroVariance),
        });
    }
    let t = mean / (sd / nf.sqrt());
    Ok(TestResult::with_df1(t, df, t_sf_two_sided(t, df)?))
}

/// Subjects × conditions table of one metric.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricMatrix {
    rows: Vec<Vec<f64>>,
}

impl MetricMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, StatsError> {
        let k = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || k == 0 {
            return Err(StatsError::BadMatrix("empty".into()));
        }
        if rows.iter().any(|r| r.len() != k) {
            return Err(StatsError::BadMatrix("ragged rows".into()));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(StatsError::BadMatrix("missing or non-finite cell".into()));
        }
        Ok(MetricMatrix { rows })
    }

    pub fn subjects(&self) -> usize {
        self.rows.len()
    }

    pub fn conditions(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[k]).collect()
    }
}

/// One-way within-subjects ANOVA decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnovaTable {
    pub ss_conditions: f64,
    pub ss_subjects: f64,
    pub ss_error: f64,
    pub df_conditions: f64,
    pub df_error: f64,
    pub ms_conditions: f64,
    pub ms_error: f64,
    pub f: f64,
    pub p: f64,
    pub flag: Option<TestFlag>,
}

impl AnovaTable {
    pub fn test(&self) -> TestResult {
        TestResult {
            statistic: self.f,
            df: (self.df_conditions, Some(self.df_error)),
            p: self.p,
            flag: self.flag,
        }
    }
}

pub fn rm_anova_table(m: &MetricMatrix) -> Result<AnovaTable, StatsError> {
    let s = m.subjects();
    let k = m.conditions();
    if s < 3 {
        return Err(StatsError::TooFewSubjects { needed: 3, got: s });
    }
    if k < 2 {
        return Err(StatsError::BadMatrix(format!("{k} condition(s), need 2")));
    }
    let (sf, kf) = (s as f64, k as f64);
    let row_mean: Vec<f64> = m.rows.iter().map(|r| r.iter().sum::<f64>() / kf).collect();
    let col_mean: Vec<f64> = (0..k)
        .map(|j| m.rows.iter().map(|r| r[j]).sum::<f64>() / sf)
        .collect();
    let grand = row_mean.iter().sum::<f64>() / sf;
    let ss_conditions = sf * col_mean.iter().map(|c| (c - grand).powi(2)).sum::<f64>();
    let ss_subjects = kf * row_mean.iter().map(|r| (r - grand).powi(2)).sum::<f64>();
    // residual of the additive model, summed directly to avoid cancellation
    let mut ss_error = 0.0;
    for (i, r) in m.rows.iter().enumerate() {
        for (j, y) in r.iter().enumerate() {
            ss_error += (y - row_mean[i] - col_mean[j] + grand).powi(2);
        }
    }
    let df_conditions = kf - 1.0;
    let df_error = (kf - 1.0) * (sf - 1.0);
    let ms_conditions = ss_conditions / df_conditions;
    let ms_error = ss_error / df_error;
    let scale = ss_conditions + ss_error;
    let (f, p, flag) = if ss_error <= ZERO_VARIANCE_REL * scale || scale == 0.0 {
        if ss_conditions > 0.0 {
            (f64::INFINITY, 0.0, Some(TestFlag::ZeroErrorVariance))
        } else {
            (0.0, 1.0, Some(TestFlag::ZeroErrorVariance))
        }
    } else {
        let f = ms_conditions / ms_error;
        (f, f_sf(f, df_conditions, df_error)?, None)
    };
    Ok(AnovaTable {
        ss_conditions,
        ss_subjects,
        ss_error,
        df_conditions,
        df_error,
        ms_conditions,
        ms_error,
        f,
        p,
        flag,
    })
}

/// F test of the condition effect; no sphericity correction.
pub fn rm_anova_oneway(m: &MetricMatrix) -> Result<TestResult, StatsError> {
    rm_anova_table(m).map(|t| t.test())
}

/// `min(1, m·p)` with `m` the number of p-values.
pub fn bonferroni(ps: &[f64]) -> Result<Vec<f64>, StatsError> {
    if let Some(p) = ps.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(StatsError::Domain(format!("p-value {p} outside [0, 1]")));
    }
    let m = ps.len() as f64;
    Ok(ps.iter().map(|p| (m * p).min(1.0)).collect())
}

#[cfg(test)]
mod unit {
    use super::*;
    use proptest::prelude::*;

    const PA: [f64; 9] = [0.72, 0.55, 0.81, 0.64, 0.49, 0.77, 0.60, 0.68, 0.58];
    const PB: [f64; 9] = [0.61, 0.57, 0.70, 0.52, 0.50, 0.66, 0.49, 0.63, 0.47];

    fn anova_reference() -> MetricMatrix {
        MetricMatrix::new(vec![
            vec![0.91, 0.74, 0.98, 0.95],
            vec![0.85, 0.70, 0.93, 0.97],
            vec![0.88, 0.69, 1.02, 0.92],
            vec![0.79, 0.61, 0.90, 0.88],
            vec![0.95, 0.80, 1.05, 1.01],
            vec![0.83, 0.72, 0.96, 0.94],
        ])
        .unwrap()
    }

    // scipy.stats.ttest_rel
    #[test]
    fn paired_reference() {
        let r = paired_t(&PA, &PB).unwrap();
        assert!((r.statistic - 4.114365078599616).abs() < 1e-6);
        assert!((r.p - 0.0033702820673144063).abs() < 1e-6);
        assert_eq!(r.df, (8.0, None));
    }

    #[test]
    fn paired_degenerate() {
        let r = paired_t(&PA, &PA).unwrap();
        assert_eq!((r.statistic, r.p), (0.0, 1.0));
        let r = paired_t(&[2.0, 3.0, 4.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(r.flag, Some(TestFlag::ZeroVariance));
        assert_eq!(r.p, 0.0);
        assert!(matches!(
            paired_t(&[1.0, 2.0], &[1.0]),
            Err(StatsError::LengthMismatch(2, 1))
        ));
    }

    // statsmodels AnovaRM
    #[test]
    fn anova_reference_matrix() {
        let t = rm_anova_table(&anova_reference()).unwrap();
        assert!((t.f - 141.2851782363978).abs() < 1e-6);
        assert!((t.p - 3.216649284905896e-11).abs() < 1e-6);
        assert_eq!((t.df_conditions, t.df_error), (3.0, 15.0));
    }

    #[test]
    fn anova_degenerate() {
        let all_equal = MetricMatrix::new(vec![vec![0.4; 4]; 5]).unwrap();
        let r = rm_anova_oneway(&all_equal).unwrap();
        assert_eq!((r.statistic, r.p), (0.0, 1.0));
        // identical condition profiles on shifted subjects
        let shifted =
            MetricMatrix::new((0..5).map(|s| vec![s as f64 * 10.0; 3]).collect()).unwrap();
        assert_eq!(rm_anova_oneway(&shifted).unwrap().p, 1.0);
        let exact = MetricMatrix::new(
            (0..4)
                .map(|s| vec![s as f64, s as f64 + 1.0, s as f64 + 3.0])
                .collect(),
        )
        .unwrap();
        let r = rm_anova_oneway(&exact).unwrap();
        assert_eq!(r.flag, Some(TestFlag::ZeroErrorVariance));
        assert_eq!(r.p, 0.0);
        let two = MetricMatrix::new(vec![vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(matches!(
            rm_anova_oneway(&two),
            Err(StatsError::TooFewSubjects { needed: 3, got: 2 })
        ));
    }

    #[test]
    fn subject_offsets_do_not_create_effects() {
        let rows: Vec<Vec<f64>> = (0..8)
            .map(|s| {
                let off = 100.0 * s as f64;
                let e = [0.03, -0.01, 0.02, -0.04][s % 4];
                vec![off + e, off - e, off + 0.5 * e, off - 0.5 * e]
            })
            .collect();
        let t = rm_anova_table(&MetricMatrix::new(rows).unwrap()).unwrap();
        assert!(t.ss_subjects > 1e4);
        assert!(t.f < 1.0);
    }

    #[test]
    fn bonferroni_arithmetic() {
        assert_eq!(bonferroni(&[0.03]).unwrap(), vec![0.03]);
        // 3 × 0.3 rounds to just below 0.9 in binary
        let adj = bonferroni(&[0.3, 0.4, 0.5]).unwrap();
        assert_eq!(adj, vec![3.0 * 0.3, 1.0, 1.0]);
        assert!((adj[0] - 0.9).abs() < 1e-15);
        let ps = [0.046, 0.001, 0.2, 0.5, 0.01, 0.0];
        let adj = bonferroni(&ps).unwrap();
        assert!((adj[0] - 0.276).abs() < 1e-15);
        assert!((adj[1] - 0.006).abs() < 1e-15);
        assert_eq!(adj[5], 0.0);
        assert!(bonferroni(&[1.2]).is_err());
    }

    proptest! {
        #[test]
        fn paired_t_antisymmetric(v in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 3..30)) {
            let (a, b): (Vec<f64>, Vec<f64>) = v.into_iter().unzip();
            let ab = paired_t(&a, &b).unwrap();
            let ba = paired_t(&b, &a).unwrap();
            prop_assert_eq!(ab.statistic, -ba.statistic);
            prop_assert_eq!(ab.p, ba.p);
            prop_assert!((0.0..=1.0).contains(&ab.p));
        }

        #[test]
        fn anova_row_shift_invariant(
            cells in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 4), 3..12),
            shifts in prop::collection::vec(-50.0f64..50.0, 12),
        ) {
            let base = rm_anova_table(&MetricMatrix::new(cells.clone()).unwrap()).unwrap();
            let moved: Vec<Vec<f64>> = cells
                .iter()
                .zip(&shifts)
                .map(|(r, d)| r.iter().map(|v| v + d).collect())
                .collect();
            let t = rm_anova_table(&MetricMatrix::new(moved).unwrap()).unwrap();
            prop_assert!((t.ss_conditions - base.ss_conditions).abs() < 1e-9);
            prop_assert!((t.ss_error - base.ss_error).abs() < 1e-9);
            prop_assert!((t.p - base.p).abs() < 1e-9);
            prop_assert!((0.0..=1.0).contains(&t.p));
        }

        #[test]
        fn bonferroni_monotone(ps in prop::collection::vec(0.0f64..=1.0, 1..12)) {
            let adj = bonferroni(&ps).unwrap();
            for i in 0..ps.len() {
                prop_assert!(adj[i] >= ps[i]);
                prop_assert!(adj[i] <= 1.0);
                for j in 0..ps.len() {
                    if ps[i] <= ps[j] {
                        prop_assert!(adj[i] <= adj[j]);
                    }
                }
            }
        }
    }
}
