//! CSV writers. Column names and order are fixed.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;
use crate::harness::montecarlo::MonteCarloReport;
use crate::mechanism::SweepRow;
use crate::uniaxial::CertificateReport;

#[derive(Serialize)]
struct SummaryRecord<'a> {
    filter: &'a str,
    #[serde(rename = "AE_deg")]
    ae_deg: f64,
    #[serde(rename = "SD_deg")]
    sd_deg: f64,
    cpu_s_mean: f64,
}

#[derive(Serialize)]
struct SeriesRecord {
    t_s: f64,
    mean_err_deg: f64,
    #[serde(rename = "p2.5_deg")]
    p2_5_deg: f64,
    #[serde(rename = "p97.5_deg")]
    p97_5_deg: f64,
    mean_uncertainty_deg: f64,
}

#[derive(Serialize)]
struct MechanismRecord {
    kappa_prior: f64,
    kappa_meas: f64,
    dtheta_rad: f64,
    kappa_post_mfd: f64,
    theta_post_mfd: f64,
    kappa_post_cgd: f64,
    theta_post_cgd: f64,
    delta_theta_plus: f64,
}

#[derive(Serialize)]
struct UniaxialRecord {
    k: usize,
    theta_err: f64,
    kappa: f64,
    #[serde(rename = "V")]
    v: f64,
    bound: f64,
}

fn write_rows<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `summary.csv` and one `series_<filter>.csv` per filter; returns the paths.
pub fn write_monte_carlo(report: &MonteCarloReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let summary = dir.join("summary.csv");
    write_rows(
        &summary,
        report.filters.iter().map(|f| SummaryRecord {
            filter: f.kind.label(),
            ae_deg: f.metrics.as_ref().map_or(f64::NAN, |m| m.ae_deg),
            sd_deg: f.metrics.as_ref().map_or(f64::NAN, |m| m.sd_deg),
            cpu_s_mean: f.cpu_s_mean,
        }),
    )?;
    let mut paths = vec![summary];
    for f in &report.filters {
        let path = dir.join(format!("series_{}.csv", f.kind.slug()));
        write_rows(
            &path,
            f.series.iter().map(|s| SeriesRecord {
                t_s: s.t_s,
                mean_err_deg: s.mean_err_deg,
                p2_5_deg: s.p2_5_deg,
                p97_5_deg: s.p97_5_deg,
                mean_uncertainty_deg: s.mean_uncertainty_deg,
            }),
        )?;
        paths.push(path);
    }
    Ok(paths)
}

/// Angles in rad.
pub fn write_mechanism(rows: &[SweepRow], path: &Path) -> Result<()> {
    write_rows(
        path,
        rows.iter().map(|r| MechanismRecord {
            kappa_prior: r.kappa_prior,
            kappa_meas: r.kappa_meas,
            dtheta_rad: r.dtheta,
            kappa_post_mfd: r.mfd.kappa,
            theta_post_mfd: r.mfd.theta_bar,
            kappa_post_cgd: r.cgd.kappa,
            theta_post_cgd: r.cgd.theta_bar,
            delta_theta_plus: r.delta_theta_plus,
        }),
    )
}

/// `theta_err` in rad; `bound` applies to the error measure `4 sin^2(theta_err / 2)`.
pub fn write_uniaxial(report: &CertificateReport, path: &Path) -> Result<()> {
    write_rows(
        path,
        report.steps.iter().map(|s| UniaxialRecord {
            k: s.k,
            theta_err: s.theta_err,
            kappa: s.kappa,
            v: s.v,
            bound: s.bound,
        }),
    )
}
