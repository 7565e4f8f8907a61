//! Simulation scenarios and the Monte Carlo rejection-rate study.
//!
//! All scenarios generate `y = 2 + 2 x1 + 2 x2 + ε` with covariates iid
//! Uniform(0, 5):
//!
//! | id | error ε                    | fitted mean      |
//! |----|----------------------------|------------------|
//! | 1  | N(0, 4)                    | 1 + x1 + x2      |
//! | 2  | N(0, 4)                    | 1 + x1 (x2 omitted) |
//! | 3  | N(0, (2 + x3)²), x3 hidden | 1 + x1 + x2      |
//! | 4  | N(0, (2 + 0.5 x2)²)        | 1 + x1 + x2      |

use std::fmt;

use rand::{Rng, RngCore};
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::bootstrap::{run_test, BootstrapConfig};
use crate::classical::{breusch_pagan, white_test};
use crate::error::{GofError, Result};
use crate::regression::{fit_mle, Dataset, ModelSpec};
use crate::rng::stream;

pub const TRUE_COEFFICIENTS: [f64; 3] = [2.0, 2.0, 2.0];
const COVARIATE_UPPER: f64 = 5.0;
const MIN_SCENARIO_N: usize = 10;
/// Fraction of failed replicates above which a run is aborted.
const MAX_FAILURE_FRACTION: f64 = 0.001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    /// Correctly specified homoskedastic model.
    Correct = 1,
    /// `x2` omitted from the fitted mean.
    OmittedCovariate = 2,
    /// Error variance driven by a covariate never observed.
    UnobservedHeteroskedasticity = 3,
    /// Error variance driven by `x2`, which is in the model.
    ObservedHeteroskedasticity = 4,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [
        Scenario::Correct,
        Scenario::OmittedCovariate,
        Scenario::UnobservedHeteroskedasticity,
        Scenario::ObservedHeteroskedasticity,
    ];

    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn description(self) -> &'static str {
        match self {
            Scenario::Correct => "correct specification",
            Scenario::OmittedCovariate => "omitted covariate",
            Scenario::UnobservedHeteroskedasticity => "heteroskedasticity in an unobserved covariate",
            Scenario::ObservedHeteroskedasticity => "heteroskedasticity in an observed covariate",
        }
    }
}

impl TryFrom<u8> for Scenario {
    type Error = GofError;

    fn try_from(id: u8) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|s| s.id() == id)
            .ok_or_else(|| GofError::InvalidConfig(format!("scenario must be 1-4, got {id}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScenarioSpec {
    pub scenario: Scenario,
    pub n: usize,
}

impl ScenarioSpec {
    pub fn new(scenario: Scenario, n: usize) -> Result<Self> {
        if n < MIN_SCENARIO_N {
            return Err(GofError::InvalidConfig(format!(
                "scenario sample size must be at least {MIN_SCENARIO_N}, got {n}"
            )));
        }
        Ok(Self { scenario, n })
    }
}

/// Draws one dataset. Only the columns the fitted model may see are
/// returned: `y, x1, x2` for scenarios 1, 3, 4 and `y, x1` for scenario 2.
pub fn generate<R: Rng + ?Sized>(spec: &ScenarioSpec, rng: &mut R) -> Dataset {
    let n = spec.n;
    let [b0, b1, b2] = TRUE_COEFFICIENTS;
    let mut y = Vec::with_capacity(n);
    let mut x1 = Vec::with_capacity(n);
    let mut x2 = Vec::with_capacity(n);
    for _ in 0..n {
        let a = COVARIATE_UPPER * rng.random::<f64>();
        let b = COVARIATE_UPPER * rng.random::<f64>();
        let sd = match spec.scenario {
            Scenario::Correct | Scenario::OmittedCovariate => 2.0,
            Scenario::UnobservedHeteroskedasticity => 2.0 + COVARIATE_UPPER * rng.random::<f64>(),
            Scenario::ObservedHeteroskedasticity => 2.0 + 0.5 * b,
        };
        let z: f64 = rng.sample(StandardNormal);
        y.push(b0 + b1 * a + b2 * b + sd * z);
        x1.push(a);
        x2.push(b);
    }
    let mut columns = vec![("y".to_string(), y), ("x1".to_string(), x1)];
    if spec.scenario != Scenario::OmittedCovariate {
        columns.push(("x2".to_string(), x2));
    }
    Dataset::new(columns).expect("generated columns are finite and of equal length")
}

/// The candidate model fitted in each scenario.
pub fn fitted_spec_for(scenario: Scenario) -> ModelSpec {
    match scenario {
        Scenario::OmittedCovariate => ModelSpec::new("y", ["x1"]),
        _ => ModelSpec::new("y", ["x1", "x2"]),
    }
}

/// Per-test quantities in table column order.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TestRates {
    pub bootstrap: f64,
    pub white: f64,
    pub breusch_pagan: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub scenario: Scenario,
    pub n: usize,
    /// Replicates requested.
    pub reps: usize,
    /// Bootstrap iterations per test.
    pub boot: usize,
    pub alpha: f64,
    pub seed: u64,
    /// Rejection proportions over the replicates that completed.
    pub rates: TestRates,
    /// Binomial standard errors `sqrt(p (1 - p) / m)`.
    pub mc_stderr: TestRates,
    /// Replicates excluded because a fit failed.
    pub excluded: usize,
}

#[derive(Debug, Clone, Copy)]
struct Decisions {
    bootstrap: bool,
    white: bool,
    breusch_pagan: bool,
}

/// Runs `reps` replicates of `scenario` at sample size `n`, applying all
/// three tests at level `cfg.alpha`.
///
/// Replicate `i` draws its data from stream `i` of `cfg.seed`; the
/// bootstrap seed for that replicate is the next word of the same stream.
pub fn run_monte_carlo(
    scenario: Scenario,
    n: usize,
    reps: usize,
    cfg: &BootstrapConfig,
) -> Result<SimReport> {
    cfg.validate()?;
    if reps == 0 {
        return Err(GofError::InvalidConfig("reps must be at least 1".into()));
    }
    let spec = ScenarioSpec::new(scenario, n)?;
    let model = fitted_spec_for(scenario);

    let outcomes: Vec<Option<Decisions>> = (0..reps)
        .into_par_iter()
        .map(|i| run_replicate(&spec, &model, cfg, i as u64).ok())
        .collect();

    let completed: Vec<Decisions> = outcomes.iter().flatten().copied().collect();
    let excluded = reps - completed.len();
    if excluded as f64 > MAX_FAILURE_FRACTION * reps as f64 {
        return Err(GofError::TooManyFailures { failed: excluded, reps });
    }

    let m = completed.len() as f64;
    let rate = |f: fn(&Decisions) -> bool| completed.iter().filter(|d| f(d)).count() as f64 / m;
    let rates = TestRates {
        bootstrap: rate(|d| d.bootstrap),
        white: rate(|d| d.white),
        breusch_pagan: rate(|d| d.breusch_pagan),
    };
    let se = |p: f64| (p * (1.0 - p) / m).sqrt();
    let mc_stderr = TestRates {
        bootstrap: se(rates.bootstrap),
        white: se(rates.white),
        breusch_pagan: se(rates.breusch_pagan),
    };
    Ok(SimReport {
        scenario,
        n,
        reps,
        boot: cfg.iterations,
        alpha: cfg.alpha,
        seed: cfg.seed,
        rates,
        mc_stderr,
        excluded,
    })
}

fn run_replicate(
    spec: &ScenarioSpec,
    model: &ModelSpec,
    cfg: &BootstrapConfig,
    index: u64,
) -> Result<Decisions> {
    let mut rng = stream(cfg.seed, index);
    let data = generate(spec, &mut rng);
    let boot_cfg = BootstrapConfig { seed: rng.next_u64(), ..*cfg };
    let fit = fit_mle(&data, model)?;
    let white = white_test(&fit, &data)?;
    let bp = breusch_pagan(&fit, &data)?;
    let boot = run_test(&data, model, &boot_cfg)?;
    Ok(Decisions {
        bootstrap: boot.reject,
        white: white.rejects(cfg.alpha),
        breusch_pagan: bp.rejects(cfg.alpha),
    })
}

impl SimReport {
    /// Aligned table of rejection rates, one row per report.
    pub fn table(reports: &[SimReport]) -> String {
        let mut out = String::new();
        if let Some(first) = reports.first() {
            out.push_str(&format!(
                "Scenario {} ({}): reps={}, B={}, alpha={}, seed={}\n",
                first.scenario.id(),
                first.scenario.description(),
                first.reps,
                first.boot,
                first.alpha,
                first.seed
            ));
        }
        out.push_str(&format!(
            "{:>6} | {:>14} | {:>10} | {:>18}\n",
            "n", "Bootstrap Test", "White Test", "Breusch-Pagan Test"
        ));
        out.push_str(&format!("{}\n", "-".repeat(59)));
        for r in reports {
            out.push_str(&format!(
                "{:>6} | {:>14.3} | {:>10.3} | {:>18.3}\n",
                r.n, r.rates.bootstrap, r.rates.white, r.rates.breusch_pagan
            ));
        }
        out
    }
}

impl fmt::Display for SimReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&SimReport::table(std::slice::from_ref(self)))
    }
}
