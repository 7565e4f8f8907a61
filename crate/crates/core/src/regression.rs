//! Normal linear regression fitted by maximum likelihood.
//!
//! Note that the error variance estimate is the MLE `RSS / n`, not the
//! unbiased `RSS / (n - r)` most regression software reports. The
//! goodness-of-fit term and its variance are defined in terms of the MLE.

use std::collections::HashSet;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{GofError, Result};
use crate::linalg::PivotedQr;

/// Name given to the leading column of ones.
pub const INTERCEPT_NAME: &str = "(Intercept)";

/// A fit whose residual variance is below this fraction of `Var(y)` is
/// treated as a perfect fit.
const DEGENERATE_RELATIVE: f64 = 1e-12;

/// Floor relative to the mean square of `y`, for responses with no spread.
const DEGENERATE_ABSOLUTE: f64 = 1e-26;

/// Named numeric columns of equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
    n: usize,
}

impl Dataset {
    pub fn new(columns: Vec<(String, Vec<f64>)>) -> Result<Self> {
        if columns.is_empty() {
            return Err(GofError::InvalidData("dataset has no columns".into()));
        }
        let n = columns[0].1.len();
        if n == 0 {
            return Err(GofError::InvalidData("dataset has no rows".into()));
        }
        let mut seen = HashSet::new();
        for (name, values) in &columns {
            if name.is_empty() {
                return Err(GofError::InvalidData("column names must be nonempty".into()));
            }
            if !seen.insert(name.as_str()) {
                return Err(GofError::InvalidData(format!("duplicate column name `{name}`")));
            }
            if values.len() != n {
                return Err(GofError::InvalidData(format!(
                    "column `{name}` has {} values, expected {n}",
                    values.len()
                )));
            }
            if let Some(row) = values.iter().position(|v| !v.is_finite()) {
                return Err(GofError::InvalidData(format!(
                    "column `{name}` has a non-finite value at row {}",
                    row + 1
                )));
            }
        }
        let (names, columns) = columns.into_iter().unzip();
        Ok(Self { names, columns, n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, name: &str) -> Result<&[f64]> {
        self.names
            .iter()
            .position(|c| c == name)
            .map(|i| self.columns[i].as_slice())
            .ok_or_else(|| GofError::UnknownColumn(name.to_string()))
    }

    /// New dataset made of the given rows, in order. Indices may repeat.
    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        let columns = self
            .columns
            .iter()
            .map(|col| rows.iter().map(|&i| col[i]).collect())
            .collect();
        Dataset { names: self.names.clone(), columns, n: rows.len() }
    }
}

/// Which column is the response and which enter the mean structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelSpec {
    pub response: String,
    pub covariates: Vec<String>,
    pub intercept: bool,
}

impl ModelSpec {
    /// Model with an intercept and the given covariates.
    pub fn new<S: Into<String>>(response: S, covariates: impl IntoIterator<Item = S>) -> Self {
        Self {
            response: response.into(),
            covariates: covariates.into_iter().map(Into::into).collect(),
            intercept: true,
        }
    }

    pub fn intercept_only<S: Into<String>>(response: S) -> Self {
        Self { response: response.into(), covariates: Vec::new(), intercept: true }
    }

    pub fn without_intercept(mut self) -> Self {
        self.intercept = false;
        self
    }

    /// Number of mean parameters `r`.
    pub fn num_mean_params(&self) -> usize {
        self.covariates.len() + usize::from(self.intercept)
    }

    pub fn coefficient_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.num_mean_params());
        if self.intercept {
            names.push(INTERCEPT_NAME.to_string());
        }
        names.extend(self.covariates.iter().cloned());
        names
    }

    /// Builds the design matrix and response vector from `data`.
    pub fn design(&self, data: &Dataset) -> Result<Design> {
        if self.covariates.contains(&self.response) {
            return Err(GofError::InvalidConfig(format!(
                "response `{}` also listed as a covariate",
                self.response
            )));
        }
        if self.num_mean_params() == 0 {
            return Err(GofError::InvalidConfig("model has no mean parameters".into()));
        }
        let y = DVector::from_column_slice(data.column(&self.response)?);
        let cols = self
            .covariates
            .iter()
            .map(|c| data.column(c))
            .collect::<Result<Vec<_>>>()?;
        let n = data.n();
        let offset = usize::from(self.intercept);
        let x = DMatrix::from_fn(n, self.num_mean_params(), |i, j| {
            if j < offset {
                1.0
            } else {
                cols[j - offset][i]
            }
        });
        Ok(Design { x, y })
    }
}

/// Design matrix `X` (n × r) and response `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
}

impl Design {
    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn select_rows(&self, rows: &[usize]) -> Design {
        Design { x: self.x.select_rows(rows), y: self.y.select_rows(rows) }
    }
}

/// Maximum-likelihood fit of a normal linear model.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedModel {
    pub spec: ModelSpec,
    /// Intercept first when present, then covariates in spec order.
    pub beta_hat: DVector<f64>,
    /// MLE of the error variance, `RSS / n`.
    pub sigma2_hat: f64,
    pub residuals: DVector<f64>,
    pub n: usize,
    /// Number of mean parameters.
    pub r: usize,
    pub loglik: f64,
    pub xtx_inverse: DMatrix<f64>,
}

impl FittedModel {
    pub fn coefficient_names(&self) -> Vec<String> {
        self.spec.coefficient_names()
    }

    /// Total parameter count, counting the error variance.
    pub fn num_params(&self) -> usize {
        self.r + 1
    }
}

/// Fits `spec` to `data` by maximum likelihood.
pub fn fit_mle(data: &Dataset, spec: &ModelSpec) -> Result<FittedModel> {
    let design = spec.design(data)?;
    fit_design(&design, spec)
}

/// Fits a prepared design. `spec` is only carried along for labelling.
pub fn fit_design(design: &Design, spec: &ModelSpec) -> Result<FittedModel> {
    let (n, r) = design.x.shape();
    if n <= r {
        return Err(GofError::InsufficientData { n, params: r });
    }
    let qr = PivotedQr::new(design.x.clone());
    let beta_hat = qr.solve(&design.y)?;
    let residuals = &design.y - &design.x * &beta_hat;
    let nf = n as f64;
    let sigma2_hat = residuals.norm_squared() / nf;

    let mean_y = design.y.mean();
    let var_y = design.y.iter().map(|v| (v - mean_y).powi(2)).sum::<f64>() / nf;
    let mean_sq = design.y.norm_squared() / nf;
    if sigma2_hat <= DEGENERATE_RELATIVE * var_y || sigma2_hat <= DEGENERATE_ABSOLUTE * mean_sq {
        return Err(GofError::DegenerateFit { sigma2: sigma2_hat });
    }

    let loglik = -0.5 * nf * (2.0 * PI).ln() - 0.5 * nf - 0.5 * nf * sigma2_hat.ln();
    Ok(FittedModel {
        spec: spec.clone(),
        beta_hat,
        sigma2_hat,
        residuals,
        n,
        r,
        loglik,
        xtx_inverse: qr.xtx_inverse()?,
    })
}

/// The likelihood goodness-of-fit term `-2ℓ(θ̂) = n log 2π + n + n log σ̂²`.
pub fn gof_term(model: &FittedModel) -> f64 {
    let n = model.n as f64;
    n * (2.0 * PI).ln() + n + n * model.sigma2_hat.ln()
}

/// Akaike information criterion with `r + 1` parameters (σ² counted).
pub fn aic(model: &FittedModel) -> f64 {
    gof_term(model) + aic_penalty(model.num_params())
}

/// Bayesian information criterion with `r + 1` parameters (σ² counted).
pub fn bic(model: &FittedModel) -> f64 {
    gof_term(model) + bic_penalty(model.n as f64, model.num_params())
}

pub fn aic_penalty(params: usize) -> f64 {
    2.0 * params as f64
}

pub fn bic_penalty(n: f64, params: usize) -> f64 {
    n.ln() * params as f64
}
