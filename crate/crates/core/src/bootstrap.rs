//! Non-parametric (case-resampling) bootstrap goodness-of-fit test.
//!
//! 1. Resample `n` rows with replacement, keeping outcomes paired with
//!    their covariates.
//! 2. Fit the candidate model and compute `Var̂[GOF]`.
//! 3. Repeat `B` times.
//! 4. Form the `100(1 - α)%` percentile interval of the `B` values.
//! 5. Reject the model when the interval does not contain `2n`.
//!
//! The percentile interval uses the 1-indexed order statistics
//! `⌈B α/2⌉` and `⌈B (1 - α/2)⌉` of the sorted bootstrap values.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{GofError, Result};
use crate::gof_variance::{sandwich_design, theoretical_var_gof};
use crate::regression::{fit_design, Dataset, Design, ModelSpec};
use crate::rng::{stream, StreamRng};

/// Absorbs floating error in `B q` before taking the ceiling, so that
/// e.g. `1000 × 0.025` selects the 25th order statistic.
const ORDER_STAT_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapConfig {
    /// Number of bootstrap iterations `B`.
    pub iterations: usize,
    /// Test level `α`.
    pub alpha: f64,
    pub seed: u64,
    /// Degenerate resamples tolerated per iteration before giving up.
    pub max_redraws: usize,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self { iterations: 1000, alpha: 0.05, seed: 0, max_redraws: 100 }
    }
}

impl BootstrapConfig {
    pub fn new(iterations: usize, alpha: f64, seed: u64) -> Result<Self> {
        let cfg = Self { iterations, alpha, seed, ..Self::default() };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations < 2 {
            return Err(GofError::InvalidConfig(format!(
                "bootstrap iterations must be at least 2, got {}",
                self.iterations
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(GofError::InvalidConfig(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GofTestResult {
    /// `Var̂[GOF]` on the original data.
    pub var_gof_observed: f64,
    /// Bootstrap `Var̂[GOF]` values in iteration order.
    pub boot_values: Vec<f64>,
    pub interval_low: f64,
    pub interval_high: f64,
    /// `2n`.
    pub reference: f64,
    pub reject: bool,
    /// Degenerate resamples discarded across all iterations.
    pub redraw_count: usize,
}

/// Draws `n` row indices uniformly with replacement.
pub fn draw_indices<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..n)).collect()
}

/// A case resample of `data`.
pub fn resample<R: Rng + ?Sized>(data: &Dataset, rng: &mut R) -> Dataset {
    let rows = draw_indices(data.n(), rng);
    data.select_rows(&rows)
}

/// 1-indexed order statistic `⌈B q⌉`, clamped to `[1, B]`.
fn order_statistic_rank(len: usize, q: f64) -> usize {
    let k = (len as f64 * q - ORDER_STAT_SLACK).ceil();
    (k.max(1.0) as usize).min(len)
}

/// Percentile interval `(⌈Bα/2⌉-th, ⌈B(1-α/2)⌉-th)` of `values`.
pub fn percentile_interval(values: &[f64], alpha: f64) -> (f64, f64) {
    assert!(!values.is_empty(), "percentile interval of an empty sample");
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let lo = order_statistic_rank(sorted.len(), alpha / 2.0);
    let hi = order_statistic_rank(sorted.len(), 1.0 - alpha / 2.0);
    (sorted[lo - 1], sorted[hi - 1])
}

/// Reject when `reference` lies outside `[low, high]`.
pub fn rejects(reference: f64, low: f64, high: f64) -> bool {
    !(low..=high).contains(&reference)
}

/// Runs the bootstrap goodness-of-fit test of `spec` on `data`.
///
/// Iterations run on the current rayon pool. Iteration `b` draws from
/// stream `b` of `cfg.seed`, so the result is identical for any number of
/// threads.
pub fn run_test(data: &Dataset, spec: &ModelSpec, cfg: &BootstrapConfig) -> Result<GofTestResult> {
    cfg.validate()?;
    let design = spec.design(data)?;
    let fit = fit_design(&design, spec)?;
    let observed = sandwich_design(&fit, &design.x)?;

    let draws = (0..cfg.iterations)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream(cfg.seed, b as u64);
            bootstrap_iteration(&design, spec, cfg, b, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;

    let redraw_count = draws.iter().map(|&(_, r)| r).sum();
    let boot_values: Vec<f64> = draws.into_iter().map(|(v, _)| v).collect();
    let (interval_low, interval_high) = percentile_interval(&boot_values, cfg.alpha);
    let reference = theoretical_var_gof(data.n());
    Ok(GofTestResult {
        var_gof_observed: observed.var_gof,
        reject: rejects(reference, interval_low, interval_high),
        boot_values,
        interval_low,
        interval_high,
        reference,
        redraw_count,
    })
}

fn bootstrap_iteration(
    design: &Design,
    spec: &ModelSpec,
    cfg: &BootstrapConfig,
    iteration: usize,
    rng: &mut StreamRng,
) -> Result<(f64, usize)> {
    let mut redraws = 0;
    loop {
        let rows = draw_indices(design.n(), rng);
        let sample = design.select_rows(&rows);
        let outcome =
            fit_design(&sample, spec).and_then(|fit| sandwich_design(&fit, &sample.x));
        match outcome {
            Ok(est) => return Ok((est.var_gof, redraws)),
            Err(
                GofError::RankDeficient { .. }
                | GofError::DegenerateFit { .. }
                | GofError::SingularInformation { .. },
            ) => {
                if redraws == cfg.max_redraws {
                    return Err(GofError::RedrawLimitExceeded {
                        iteration,
                        limit: cfg.max_redraws,
                    });
                }
                redraws += 1;
            }
            Err(other) => return Err(other),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_statistic_interval() {
        let values: Vec<f64> = (1..=1000).rev().map(f64::from).collect();
        assert_eq!(percentile_interval(&values, 0.05), (25.0, 975.0));
        assert_eq!(percentile_interval(&values, 0.10), (50.0, 950.0));
        let small: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(percentile_interval(&small, 0.05), (1.0, 10.0));
    }

    #[test]
    fn decision_rule() {
        assert!(rejects(200.0, 150.0, 190.0));
        assert!(!rejects(200.0, 150.0, 210.0));
        assert!(!rejects(200.0, 200.0, 200.0));
        assert!(rejects(100.0, 150.0, 210.0));
    }

    #[test]
    fn single_row_resample_is_identity() {
        let data = Dataset::new(vec![("y".into(), vec![3.5]), ("x".into(), vec![-1.0])]).unwrap();
        let mut rng = stream(1, 0);
        assert_eq!(resample(&data, &mut rng), data);
    }

    #[test]
    fn resample_is_seeded() {
        let data = Dataset::new(vec![("y".into(), (0..50).map(f64::from).collect())]).unwrap();
        let a = resample(&data, &mut stream(42, 7));
        let b = resample(&data, &mut stream(42, 7));
        assert_eq!(a, b);
        assert_ne!(a, resample(&data, &mut stream(43, 7)));
    }

    #[test]
    fn resample_keeps_rows_paired() {
        let data = Dataset::new(vec![
            ("y".into(), (0..20).map(|i| f64::from(i) * 10.0).collect()),
            ("x".into(), (0..20).map(f64::from).collect()),
        ])
        .unwrap();
        let boot = resample(&data, &mut stream(5, 0));
        let (y, x) = (boot.column("y").unwrap(), boot.column("x").unwrap());
        assert!(y.iter().zip(x).all(|(a, b)| *a == b * 10.0));
    }

    #[test]
    fn resample_frequencies_are_uniform() {
        let mut rng = stream(2024, 0);
        let mut counts = [0usize; 4];
        let draws = 100_000;
        for _ in 0..draws / 4 {
            for i in draw_indices(4, &mut rng) {
                counts[i] += 1;
            }
        }
        for c in counts {
            let freq = c as f64 / draws as f64;
            assert!((freq - 0.25).abs() < 0.01, "frequency {freq}");
        }
    }

    #[test]
    fn config_validation() {
        assert!(BootstrapConfig::new(1, 0.05, 0).is_err());
        assert!(BootstrapConfig::new(2, 0.05, 0).is_ok());
        assert!(BootstrapConfig::new(100, 0.0, 0).is_err());
        assert!(BootstrapConfig::new(100, 1.0, 0).is_err());
        assert!(BootstrapConfig::new(100, f64::NAN, 0).is_err());
        let d = BootstrapConfig::default();
        assert_eq!((d.iterations, d.alpha, d.max_redraws), (1000, 0.05, 100));
    }

    #[test]
    fn redraw_limit_is_enforced() {
        // Binary covariate with a single 1: most resamples drop it and
        // become rank deficient.
        let mut x = vec![0.0; 30];
        x[0] = 1.0;
        let y: Vec<f64> = (0..30).map(|i| ((i * 7919) % 13) as f64).collect();
        let data = Dataset::new(vec![("y".into(), y), ("x".into(), x)]).unwrap();
        let spec = ModelSpec::new("y", ["x"]);
        let cfg = BootstrapConfig { iterations: 50, alpha: 0.05, seed: 3, max_redraws: 0 };
        assert!(matches!(
            run_test(&data, &spec, &cfg),
            Err(GofError::RedrawLimitExceeded { limit: 0, .. })
        ));
        let cfg = BootstrapConfig { max_redraws: 100, ..cfg };
        let res = run_test(&data, &spec, &cfg).unwrap();
        assert!(res.redraw_count > 0);
        assert_eq!(res.boot_values.len(), 50);
    }
}
