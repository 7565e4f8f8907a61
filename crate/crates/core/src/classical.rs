//! White and Breusch-Pagan heteroskedasticity tests.
//!
//! Both regress the squared residuals of a fitted model on an auxiliary
//! design (always with an intercept) and refer `n R²` to a chi-squared
//! distribution. Breusch-Pagan uses the studentized (Koenker) form with the
//! model's covariates; White adds their squares and pairwise products.

use nalgebra::{DMatrix, DVector};

use crate::error::{GofError, Result};
use crate::linalg::PivotedQr;
use crate::regression::{Dataset, FittedModel};
use crate::special_fn::chi_squared_sf;

/// Squared residuals whose relative spread is below this are treated as
/// constant, giving `R² = 0`.
const CONSTANT_RESPONSE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxTestResult {
    /// `n R²` of the auxiliary regression.
    pub statistic: f64,
    /// Non-intercept auxiliary regressors.
    pub df: usize,
    pub p_value: f64,
}

impl AuxTestResult {
    pub fn rejects(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

/// Koenker's studentized Breusch-Pagan test.
pub fn breusch_pagan(model: &FittedModel, data: &Dataset) -> Result<AuxTestResult> {
    let covariates = model_covariates(model, data)?;
    auxiliary_test(model, covariates)
}

/// White's test: covariates, their squares and all pairwise products.
pub fn white_test(model: &FittedModel, data: &Dataset) -> Result<AuxTestResult> {
    let base = model_covariates(model, data)?;
    let mut columns: Vec<Vec<f64>> = base.clone();
    for (i, a) in base.iter().enumerate() {
        for b in &base[i..] {
            columns.push(a.iter().zip(b).map(|(u, v)| u * v).collect());
        }
    }
    auxiliary_test(model, dedup_columns(columns))
}

/// Labels of the White auxiliary regressors in construction order:
/// `x_1..x_k`, then `x_i x_j` for `i <= j`. Before fitting, columns that
/// exactly repeat an earlier one or are constant are dropped.
pub fn white_regressor_labels(names: &[String]) -> Vec<String> {
    let mut labels: Vec<String> = names.to_vec();
    for (i, a) in names.iter().enumerate() {
        for b in &names[i..] {
            labels.push(if a == b { format!("{a}^2") } else { format!("{a}*{b}") });
        }
    }
    labels
}

fn model_covariates(model: &FittedModel, data: &Dataset) -> Result<Vec<Vec<f64>>> {
    if model.spec.covariates.is_empty() {
        return Err(GofError::InvalidConfig(
            "heteroskedasticity tests need at least one non-intercept covariate".into(),
        ));
    }
    if data.n() != model.n {
        return Err(GofError::InvalidData(format!(
            "model was fitted on {} rows but dataset has {}",
            model.n,
            data.n()
        )));
    }
    model
        .spec
        .covariates
        .iter()
        .map(|c| data.column(c).map(<[f64]>::to_vec))
        .collect()
}

fn dedup_columns(columns: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut kept: Vec<Vec<f64>> = Vec::with_capacity(columns.len());
    for col in columns {
        let constant = col.iter().all(|&v| v == col[0]);
        if !constant && !kept.contains(&col) {
            kept.push(col);
        }
    }
    kept
}

fn auxiliary_test(model: &FittedModel, regressors: Vec<Vec<f64>>) -> Result<AuxTestResult> {
    let n = model.n;
    let df = regressors.len();
    if df == 0 {
        return Err(GofError::RankDeficient { rank: 1, columns: 1 });
    }
    if n <= df + 1 {
        return Err(GofError::InsufficientData { n, params: df + 1 });
    }
    let z = DMatrix::from_fn(n, df + 1, |i, j| if j == 0 { 1.0 } else { regressors[j - 1][i] });
    let e2 = model.residuals.map(|e| e * e);
    let r2 = r_squared(z, &e2)?;
    let statistic = n as f64 * r2;
    let p_value = chi_squared_sf(statistic, df as f64)?;
    Ok(AuxTestResult { statistic, df, p_value })
}

/// `R²` of regressing `target` on `design` (which contains an intercept).
fn r_squared(design: DMatrix<f64>, target: &DVector<f64>) -> Result<f64> {
    let mean = target.mean();
    let tss: f64 = target.iter().map(|v| (v - mean).powi(2)).sum();
    if tss <= CONSTANT_RESPONSE * CONSTANT_RESPONSE * target.norm_squared() {
        // Still surface rank problems in the auxiliary design.
        let qr = PivotedQr::new(design);
        if !qr.is_full_rank() {
            return Err(GofError::RankDeficient { rank: qr.rank(), columns: qr.ncols() });
        }
        return Ok(0.0);
    }
    let fitted = {
        let qr = PivotedQr::new(design.clone());
        let coef = qr.solve(target)?;
        design * coef
    };
    let rss = (target - fitted).norm_squared();
    Ok((1.0 - rss / tss).clamp(0.0, 1.0))
}
