use nalgebra::{DMatrix, DVector};

use super::ModelError;

/// `y = weights · x + intercept`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OlsWarning {
    /// Numerical rank of the design (intercept column included) is below
    /// its column count; the minimum-norm solution was returned.
    RankDeficient { rank: usize, columns: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub model: LinearModel,
    pub warning: Option<OlsWarning>,
}

/// Least squares with an appended intercept column, solved through the SVD
/// of the design. Singular values below `s_max * max(n, p) * eps` are treated
/// as zero, which yields the minimum-norm solution on rank-deficient designs.
pub fn fit_ols(x: &[Vec<f64>], y: &[f64]) -> Result<OlsFit, ModelError> {
    let n = x.len();
    if n != y.len() {
        return Err(ModelError::DimensionMismatch {
            expected: n,
            got: y.len(),
        });
    }
    let p = x.first().map_or(0, Vec::len);
    if n <= p {
        return Err(ModelError::TooFewSamples { n, p });
    }
    if let Some(row) = x.iter().find(|r| r.len() != p) {
        return Err(ModelError::DimensionMismatch {
            expected: p,
            got: row.len(),
        });
    }
    let cols = p + 1;
    let design = DMatrix::from_fn(n, cols, |r, c| if c == p { 1.0 } else { x[r][c] });
    let svd = design.svd(true, true);
    let s_max = svd.singular_values.max();
    let tol = s_max * n.max(cols) as f64 * f64::EPSILON;
    let rank = svd.singular_values.iter().filter(|s| **s > tol).count();
    let beta = svd
        .solve(&DVector::from_column_slice(y), tol)
        .map_err(|e| ModelError::Numerical(e.to_string()))?;
    if beta.iter().any(|v| !v.is_finite()) {
        return Err(ModelError::Numerical("non-finite coefficient".into()));
    }
    let warning = if rank < cols {
        log::warn!(
            "rank-deficient design: rank {rank} of {cols} columns, using minimum-norm solution"
        );
        Some(OlsWarning::RankDeficient {
            rank,
            columns: cols,
        })
    } else {
        None
    };
    Ok(OlsFit {
        model: LinearModel {
            weights: beta.iter().take(p).copied().collect(),
            intercept: beta[p],
        },
        warning,
    })
}

pub fn predict_linear(m: &LinearModel, x: &[Vec<f64>]) -> Result<Vec<f64>, ModelError> {
    x.iter()
        .map(|row| {
            if row.len() != m.weights.len() {
                return Err(ModelError::DimensionMismatch {
                    expected: m.weights.len(),
                    got: row.len(),
                });
            }
            Ok(row.iter().zip(&m.weights).map(|(a, w)| a * w).sum::<f64>() + m.intercept)
        })
        .collect()
}
