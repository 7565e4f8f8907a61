//! The `fit`, `test` and `simulate` commands.

use std::fmt::Write as _;

use gofboot_core::bootstrap::{run_test, BootstrapConfig, GofTestResult};
use gofboot_core::classical::{breusch_pagan, white_test, AuxTestResult};
use gofboot_core::gof_variance::{exact_var_gof, sandwich, theoretical_var_gof};
use gofboot_core::regression::{aic, bic, fit_mle, gof_term, Dataset, FittedModel, ModelSpec};
use gofboot_core::sim::{run_monte_carlo, Scenario, SimReport};
use serde_json::{json, Map, Value};

use crate::format::{fmt6, num};
use crate::ingest::ingest_csv;
use crate::{CliError, ExitStatus, FitArgs, ModelArgs, OutputFormat, Outcome, SimulateArgs, TestArgs};

struct FitSummary {
    model: FittedModel,
    gof: f64,
    aic: f64,
    bic: f64,
    var_gof: f64,
    reference: f64,
    exact: f64,
}

fn load(args: &ModelArgs) -> Result<(Dataset, ModelSpec), CliError> {
    let data = ingest_csv(&args.data)?;
    let mut spec = ModelSpec::new(args.response.clone(), args.covariates.iter().cloned());
    spec.intercept = !args.no_intercept;
    Ok((data, spec))
}

fn summarize(data: &Dataset, spec: &ModelSpec) -> Result<FitSummary, CliError> {
    let model = fit_mle(data, spec)?;
    let var_gof = sandwich(&model, data)?.var_gof;
    Ok(FitSummary {
        gof: gof_term(&model),
        aic: aic(&model),
        bic: bic(&model),
        var_gof,
        reference: theoretical_var_gof(model.n),
        exact: exact_var_gof(model.n, model.r)?,
        model,
    })
}

fn fit_text(s: &FitSummary) -> String {
    let m = &s.model;
    let mut out = String::new();
    let mut terms: Vec<&str> = m.spec.covariates.iter().map(String::as_str).collect();
    if m.spec.intercept {
        terms.insert(0, "1");
    }
    let rhs = terms.join(" + ");
    let _ = writeln!(out, "Model: {} ~ {}   (n = {}, r = {})", m.spec.response, rhs, m.n, m.r);
    let _ = writeln!(out, "Coefficients:");
    let width = m.coefficient_names().iter().map(String::len).max().unwrap_or(0);
    for (name, b) in m.coefficient_names().iter().zip(m.beta_hat.iter()) {
        let _ = writeln!(out, "  {name:<width$}  {}", fmt6(*b));
    }
    let rows = [
        ("sigma2_hat (MLE, RSS/n)", s.model.sigma2_hat),
        ("-2 loglik (GOF term)", s.gof),
        ("AIC", s.aic),
        ("BIC", s.bic),
        ("Var_hat[GOF] (sandwich)", s.var_gof),
        ("reference 2n", s.reference),
        ("exact variance", s.exact),
    ];
    for (label, v) in rows {
        let _ = writeln!(out, "{label:<24} {}", fmt6(v));
    }
    out
}

fn fit_json(s: &FitSummary) -> Map<String, Value> {
    let m = &s.model;
    let mut obj = Map::new();
    obj.insert("n".into(), json!(m.n));
    obj.insert("r".into(), json!(m.r));
    obj.insert("response".into(), json!(m.spec.response));
    obj.insert("coefficient_names".into(), json!(m.coefficient_names()));
    obj.insert("beta_hat".into(), Value::Array(m.beta_hat.iter().map(|b| num(*b)).collect()));
    obj.insert("sigma2_hat".into(), num(m.sigma2_hat));
    obj.insert("gof_term".into(), num(s.gof));
    obj.insert("aic".into(), num(s.aic));
    obj.insert("bic".into(), num(s.bic));
    obj.insert("var_gof".into(), num(s.var_gof));
    obj.insert("reference".into(), num(s.reference));
    obj.insert("exact_var_gof".into(), num(s.exact));
    obj
}

fn render_json(obj: Map<String, Value>) -> String {
    let mut text = serde_json::to_string_pretty(&Value::Object(obj)).expect("JSON values serialize");
    text.push('\n');
    text
}

pub fn fit(args: &FitArgs) -> Result<Outcome, CliError> {
    let (data, spec) = load(&args.model)?;
    let summary = summarize(&data, &spec)?;
    let stdout = match args.model.format {
        OutputFormat::Text => fit_text(&summary),
        OutputFormat::Json => {
            let mut obj = Map::new();
            obj.insert("command".into(), json!("fit"));
            obj.extend(fit_json(&summary));
            render_json(obj)
        }
    };
    Ok(Outcome { stdout, stderr: String::new(), status: ExitStatus::NotRejected })
}

fn aux_json(res: &Option<AuxTestResult>, alpha: f64) -> Value {
    match res {
        Some(r) => json!({
            "statistic": num(r.statistic),
            "df": r.df,
            "p_value": num(r.p_value),
            "reject": r.rejects(alpha),
        }),
        None => Value::Null,
    }
}

fn aux_text(out: &mut String, label: &str, res: &Option<AuxTestResult>, alpha: f64) {
    match res {
        Some(r) => {
            let _ = writeln!(
                out,
                "{label}: statistic {} on {} df, p-value {} -> {}",
                fmt6(r.statistic),
                r.df,
                fmt6(r.p_value),
                decision(r.rejects(alpha))
            );
        }
        None => {
            let _ = writeln!(out, "{label}: not applicable (no covariates)");
        }
    }
}

fn decision(reject: bool) -> &'static str {
    if reject {
        "reject"
    } else {
        "fail to reject"
    }
}

pub fn test(args: &TestArgs) -> Result<Outcome, CliError> {
    let (data, spec) = load(&args.model)?;
    let seed = args.seed.unwrap_or_else(rand::random);
    let mut cfg = BootstrapConfig::new(args.boot, args.alpha, seed)?;
    cfg.max_redraws = args.max_redraws;

    let summary = summarize(&data, &spec)?;
    let boot: GofTestResult = run_test(&data, &spec, &cfg)?;
    let (white, bp) = if spec.covariates.is_empty() {
        (None, None)
    } else {
        (Some(white_test(&summary.model, &data)?), Some(breusch_pagan(&summary.model, &data)?))
    };

    let stdout = match args.model.format {
        OutputFormat::Text => {
            let mut out = fit_text(&summary);
            let level = 100.0 * (1.0 - cfg.alpha);
            let _ = writeln!(
                out,
                "\nBootstrap goodness-of-fit test (B = {}, alpha = {}, seed = {})",
                cfg.iterations, cfg.alpha, seed
            );
            let _ = writeln!(
                out,
                "  {}% percentile interval: [{}, {}]",
                fmt6(level),
                fmt6(boot.interval_low),
                fmt6(boot.interval_high)
            );
            let _ = writeln!(out, "  reference 2n: {}", fmt6(boot.reference));
            let _ = writeln!(out, "  degenerate resamples redrawn: {}", boot.redraw_count);
            let _ = writeln!(out, "  decision: {}", decision(boot.reject));
            aux_text(&mut out, "White test", &white, cfg.alpha);
            aux_text(&mut out, "Breusch-Pagan test", &bp, cfg.alpha);
            out
        }
        OutputFormat::Json => {
            let mut obj = Map::new();
            obj.insert("command".into(), json!("test"));
            obj.extend(fit_json(&summary));
            obj.insert("interval".into(), json!([num(boot.interval_low), num(boot.interval_high)]));
            obj.insert("reject".into(), json!(boot.reject));
            obj.insert("redraw_count".into(), json!(boot.redraw_count));
            obj.insert("seed".into(), json!(seed));
            obj.insert("B".into(), json!(cfg.iterations));
            obj.insert("alpha".into(), num(cfg.alpha));
            obj.insert("white".into(), aux_json(&white, cfg.alpha));
            obj.insert("breusch_pagan".into(), aux_json(&bp, cfg.alpha));
            render_json(obj)
        }
    };
    let status = if boot.reject { ExitStatus::Rejected } else { ExitStatus::NotRejected };
    Ok(Outcome { stdout, stderr: String::new(), status })
}

pub fn simulate(args: &SimulateArgs) -> Result<Outcome, CliError> {
    let scenario = Scenario::try_from(args.scenario)?;
    let mut cfg = BootstrapConfig::new(args.boot, args.alpha, args.seed)?;
    cfg.max_redraws = args.max_redraws;
    let reports = args
        .n
        .iter()
        .map(|&n| run_monte_carlo(scenario, n, args.reps, &cfg))
        .collect::<Result<Vec<_>, _>>()?;

    let stdout = match args.format {
        OutputFormat::Text => {
            let mut out = SimReport::table(&reports);
            let worst = reports
                .iter()
                .flat_map(|r| [r.mc_stderr.bootstrap, r.mc_stderr.white, r.mc_stderr.breusch_pagan])
                .fold(0.0, f64::max);
            let excluded: usize = reports.iter().map(|r| r.excluded).sum();
            let _ = writeln!(out, "largest Monte Carlo standard error: {}", fmt6(worst));
            if excluded > 0 {
                let _ = writeln!(out, "replicates excluded after fit failures: {excluded}");
            }
            out
        }
        OutputFormat::Json => {
            let rows: Vec<Value> = reports
                .iter()
                .map(|r| {
                    json!({
                        "n": r.n,
                        "rates": {
                            "bootstrap": num(r.rates.bootstrap),
                            "white": num(r.rates.white),
                            "breusch_pagan": num(r.rates.breusch_pagan),
                        },
                        "mc_stderr": {
                            "bootstrap": num(r.mc_stderr.bootstrap),
                            "white": num(r.mc_stderr.white),
                            "breusch_pagan": num(r.mc_stderr.breusch_pagan),
                        },
                        "excluded": r.excluded,
                    })
                })
                .collect();
            let mut obj = Map::new();
            obj.insert("command".into(), json!("simulate"));
            obj.insert("scenario".into(), json!(scenario.id()));
            obj.insert("reps".into(), json!(args.reps));
            obj.insert("B".into(), json!(cfg.iterations));
            obj.insert("alpha".into(), num(cfg.alpha));
            obj.insert("seed".into(), json!(cfg.seed));
            obj.insert("rows".into(), Value::Array(rows));
            render_json(obj)
        }
    };
    Ok(Outcome { stdout, stderr: String::new(), status: ExitStatus::NotRejected })
}
