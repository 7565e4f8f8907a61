//! Variance of the goodness-of-fit term `-2ℓ(θ̂)`.
//!
//! Parameters are ordered `θ = [β (r entries), σ²]` throughout, so the
//! robust variance of `σ̂²` is the bottom-right element of the sandwich.
//!
//! The textbook display of the average Hessian `A_n` carries a positive
//! β-block while being equated with `-I_n / n`. The sandwich
//! `A⁻¹ B A⁻¹` is invariant to that sign, so it is computed here as
//! `n I_n⁻¹ (Σ U_i U_iᵀ) I_n⁻¹` with `I_n` the observed information.

use nalgebra::{DMatrix, DVector};

use crate::error::{GofError, Result};
use crate::linalg::symmetric_inverse;
use crate::regression::{Dataset, FittedModel};
use crate::special_fn::trigamma;

/// Sandwich estimate of the covariance of `θ̂` and the derived `Var̂[GOF]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SandwichEstimate {
    /// Observed information `I_n(θ̂)`, (r+1)×(r+1).
    pub observed_info: DMatrix<f64>,
    /// `Σ U_i(θ̂) U_i(θ̂)ᵀ`.
    pub score_outer_sum: DMatrix<f64>,
    /// `C_n(θ̂) = n I_n⁻¹ (Σ U_i U_iᵀ) I_n⁻¹`.
    pub c_n: DMatrix<f64>,
    /// Robust variance of `σ̂²`: the bottom-right element of `c_n`.
    pub s_n: f64,
    /// `(n / σ̂⁴) s_n`.
    pub var_gof: f64,
}

/// Per-observation scores `U_i(θ̂)`, one (r+1)-vector per row.
pub fn score_components(model: &FittedModel, data: &Dataset) -> Result<Vec<DVector<f64>>> {
    let x = model.spec.design(data)?.x;
    Ok((0..model.n).map(|i| score_row(model, &x, i)).collect())
}

fn score_row(model: &FittedModel, x: &DMatrix<f64>, i: usize) -> DVector<f64> {
    let r = model.r;
    let s2 = model.sigma2_hat;
    let e = model.residuals[i];
    let mut u = DVector::zeros(r + 1);
    for j in 0..r {
        u[j] = e * x[(i, j)] / s2;
    }
    u[r] = -0.5 / s2 + 0.5 * e * e / (s2 * s2);
    u
}

/// Observed information `I_n(θ̂)` of the normal linear model.
pub fn observed_information(model: &FittedModel, data: &Dataset) -> Result<DMatrix<f64>> {
    let x = model.spec.design(data)?.x;
    Ok(observed_information_design(model, &x))
}

pub(crate) fn observed_information_design(model: &FittedModel, x: &DMatrix<f64>) -> DMatrix<f64> {
    let r = model.r;
    let n = model.n as f64;
    let s2 = model.sigma2_hat;
    let s4 = s2 * s2;
    let rss = model.residuals.norm_squared();
    let xtx = x.tr_mul(x);
    let xte = x.tr_mul(&model.residuals);

    let mut info = DMatrix::zeros(r + 1, r + 1);
    info.view_mut((0, 0), (r, r)).copy_from(&(xtx / s2));
    for j in 0..r {
        info[(j, r)] = xte[j] / s4;
        info[(r, j)] = xte[j] / s4;
    }
    info[(r, r)] = -0.5 * n / s4 + rss / (s4 * s2);
    info
}

/// Robust sandwich estimate for a model fitted on `data`.
pub fn sandwich(model: &FittedModel, data: &Dataset) -> Result<SandwichEstimate> {
    let x = model.spec.design(data)?.x;
    sandwich_design(model, &x)
}

pub(crate) fn sandwich_design(model: &FittedModel, x: &DMatrix<f64>) -> Result<SandwichEstimate> {
    let r = model.r;
    let observed_info = observed_information_design(model, x);
    let info_inv = symmetric_inverse(&observed_info)?;

    let mut score_outer_sum = DMatrix::zeros(r + 1, r + 1);
    let mut u = vec![0.0; r + 1];
    let s2 = model.sigma2_hat;
    for i in 0..model.n {
        let e = model.residuals[i];
        for (j, uj) in u.iter_mut().take(r).enumerate() {
            *uj = e * x[(i, j)] / s2;
        }
        u[r] = -0.5 / s2 + 0.5 * e * e / (s2 * s2);
        for a in 0..=r {
            for b in a..=r {
                score_outer_sum[(a, b)] += u[a] * u[b];
            }
        }
    }
    for a in 0..=r {
        for b in 0..a {
            score_outer_sum[(a, b)] = score_outer_sum[(b, a)];
        }
    }

    let n = model.n as f64;
    let c = &info_inv * &score_outer_sum * &info_inv * n;
    let c_n = (&c + c.transpose()) * 0.5;
    let s_n = c_n[(r, r)];
    if !s_n.is_finite() {
        return Err(GofError::SingularInformation { condition: f64::INFINITY });
    }
    let s_n = s_n.max(0.0);
    let var_gof = n / (s2 * s2) * s_n;
    Ok(SandwichEstimate { observed_info, score_outer_sum, c_n, s_n, var_gof })
}

/// Large-sample variance of the goodness-of-fit term under correct
/// specification: `2n`.
pub fn theoretical_var_gof(n: usize) -> f64 {
    2.0 * n as f64
}

/// Exact finite-sample variance `n² ψ⁽¹⁾((n - r) / 2)` under correct
/// specification, from `n σ̂² / σ² ~ χ²_{n-r}`.
pub fn exact_var_gof(n: usize, r: usize) -> Result<f64> {
    if n <= r {
        return Err(GofError::Domain(format!("exact variance requires n > r (n = {n}, r = {r})")));
    }
    let nf = n as f64;
    Ok(nf * nf * trigamma((n - r) as f64 / 2.0)?)
}
