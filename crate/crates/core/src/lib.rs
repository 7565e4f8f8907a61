//! Bootstrap goodness-of-fit test for normal linear regression models.
//!
//! Under correct specification the variance of the likelihood
//! goodness-of-fit term `-2ℓ(θ̂)` is approximately `2n`. The test bootstraps
//! a misspecification-robust sandwich estimate of that variance and rejects
//! the model when a percentile interval for it excludes `2n`.
//!
//! - [`regression`]: maximum-likelihood fits, `-2ℓ(θ̂)`, AIC and BIC
//! - [`gof_variance`]: sandwich estimate `Var̂[GOF]`, `2n`, exact variance
//! - [`bootstrap`]: case-resampling bootstrap test
//! - [`classical`]: White and Breusch-Pagan comparator tests
//! - [`sim`]: simulation scenarios and the Monte Carlo runner
//! - [`special_fn`]: trigamma and chi-squared distribution function

pub mod bootstrap;
pub mod classical;
pub mod error;
pub mod gof_variance;
pub mod linalg;
pub mod regression;
pub mod rng;
pub mod sim;
pub mod special_fn;

pub use bootstrap::{run_test, BootstrapConfig, GofTestResult};
pub use classical::{breusch_pagan, white_test, AuxTestResult};
pub use error::{GofError, Result};
pub use gof_variance::{exact_var_gof, sandwich, theoretical_var_gof, SandwichEstimate};
pub use regression::{aic, bic, fit_mle, gof_term, Dataset, FittedModel, ModelSpec};
pub use sim::{run_monte_carlo, Scenario, ScenarioSpec, SimReport};
