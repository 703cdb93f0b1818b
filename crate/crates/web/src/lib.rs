//! WebAssembly bindings for the demo page in `www/`. Every export returns a
//! JSON string so the page needs no generated glue beyond `wasm-bindgen`.

use mfd_attitude::harness::{run_monte_carlo, vector_scenario, FilterKind, NoiseCase};
use mfd_attitude::mechanism::{dtheta_grid, fuse_cgd_1d, fuse_mfd_1d, table2_scenario};
use mfd_attitude::uniaxial::{stability_trials, StabilityConstants, TrialSpec};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct FusionCurve {
    dtheta: Vec<f64>,
    kappa_mfd: Vec<f64>,
    theta_mfd: Vec<f64>,
    kappa_cgd: Vec<f64>,
    theta_cgd: Vec<f64>,
}

#[derive(Serialize)]
struct UniaxialTrial {
    gamma1: f64,
    gamma2: f64,
    rate: f64,
    k: Vec<usize>,
    error: Vec<f64>,
    bound: Vec<f64>,
    v: Vec<f64>,
    kappa: Vec<f64>,
    violations: usize,
}

#[derive(Serialize)]
struct FilterRun {
    filter: &'static str,
    ae_deg: f64,
    sd_deg: f64,
    failed_runs: usize,
    t_s: Vec<f64>,
    mean_err_deg: Vec<f64>,
}

#[derive(Serialize)]
struct Table2Row {
    t: usize,
    kappa_mfd: f64,
    theta_mfd_deg: f64,
    kappa_cgd: f64,
    theta_cgd_deg: f64,
}

fn to_json<T: Serialize>(v: &T) -> Result<String, JsError> {
    serde_json::to_string(v).map_err(|e| JsError::new(&e.to_string()))
}

fn js_err(e: mfd_attitude::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Posterior concentration and mean of both fusion rules over `n` angle differences, angles in rad.
#[wasm_bindgen]
pub fn fusion_curve(kappa_prior: f64, kappa_meas: f64, n: usize) -> Result<String, JsError> {
    if !(kappa_prior > 0.0 && kappa_meas > 0.0) || n == 0 {
        return Err(JsError::new("concentrations must be positive and n at least 1"));
    }
    let dtheta = dtheta_grid(n);
    let mfd: Vec<_> = dtheta.iter().map(|&d| fuse_mfd_1d(kappa_prior, kappa_meas, d)).collect();
    let cgd: Vec<_> = dtheta.iter().map(|&d| fuse_cgd_1d(kappa_prior, kappa_meas, d)).collect();
    to_json(&FusionCurve {
        kappa_mfd: mfd.iter().map(|p| p.kappa).collect(),
        theta_mfd: mfd.iter().map(|p| p.theta_bar).collect(),
        kappa_cgd: cgd.iter().map(|p| p.kappa).collect(),
        theta_cgd: cgd.iter().map(|p| p.theta_bar).collect(),
        dtheta,
    })
}

/// One random single-axis run checked against the exponential bound.
#[wasm_bindgen]
pub fn uniaxial_trial(
    alpha1: f64,
    alpha2: f64,
    beta1: f64,
    beta2: f64,
    epsilon: f64,
    steps: usize,
    seed: u64,
) -> Result<String, JsError> {
    let c = StabilityConstants::new(alpha1, alpha2, beta1, beta2, epsilon).map_err(js_err)?;
    let spec = TrialSpec::new(c, steps.max(1));
    let report = stability_trials(&spec, 1, seed).remove(0);
    to_json(&UniaxialTrial {
        gamma1: c.gamma1(),
        gamma2: c.gamma2(),
        rate: c.rate(),
        k: report.steps.iter().map(|s| s.k).collect(),
        error: report.steps.iter().map(|s| s.error).collect(),
        bound: report.steps.iter().map(|s| s.bound).collect(),
        v: report.steps.iter().map(|s| s.v).collect(),
        kappa: report.steps.iter().map(|s| s.kappa).collect(),
        violations: report.violations.len(),
    })
}

/// Monte-Carlo run of all estimators from the antipodal initial belief.
/// `case` 0, 1, 2 selects the 0.24, 0.04 and anisotropic direction noise.
#[wasm_bindgen]
pub fn large_error_run(case: u8, runs: usize, duration_s: f64, seed: u64) -> Result<String, JsError> {
    let case = match case {
        0 => NoiseCase::Isotropic024,
        1 => NoiseCase::Isotropic004,
        2 => NoiseCase::Anisotropic,
        _ => return Err(JsError::new("case must be 0, 1 or 2")),
    };
    let mut sc = vector_scenario(case, true, runs.max(1), seed);
    sc.montecarlo.duration_s = duration_s;
    sc.montecarlo.timing = false;
    let report = run_monte_carlo(&sc).map_err(js_err)?;
    let out: Vec<FilterRun> = FilterKind::ALL
        .iter()
        .filter_map(|&kind| report.filter(kind))
        .map(|f| FilterRun {
            filter: f.kind.label(),
            ae_deg: report.ae_deg(f.kind),
            sd_deg: f.metrics.as_ref().map_or(f64::NAN, |m| m.sd_deg),
            failed_runs: f.failed_runs,
            t_s: f.series.iter().map(|s| s.t_s).collect(),
            mean_err_deg: f.series.iter().map(|s| s.mean_err_deg).collect(),
        })
        .collect();
    to_json(&out)
}

/// Rows of the two-step fusion example.
#[wasm_bindgen]
pub fn table2() -> Result<String, JsError> {
    let table = table2_scenario().map_err(js_err)?;
    let rows: Vec<Table2Row> = table
        .steps
        .iter()
        .enumerate()
        .map(|(t, s)| Table2Row {
            t,
            kappa_mfd: s.mfd.kappa,
            theta_mfd_deg: s.mfd.theta_bar.to_degrees(),
            kappa_cgd: s.cgd.kappa,
            theta_cgd_deg: s.cgd.theta_bar.to_degrees(),
        })
        .collect();
    to_json(&rows)
}
