use crate::error::{Error, Result};

/// Accuracy over a set of runs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    /// Mean error over all runs and samples, deg.
    pub ae_deg: f64,
    /// Sample standard deviation of the per-run mean errors, deg.
    pub sd_deg: f64,
    pub per_run_mean_deg: Vec<f64>,
}

/// `errors[i]` holds the attitude errors (rad) of run `i`.
pub fn compute_metrics(errors: &[Vec<f64>]) -> Result<RunMetrics> {
    if errors.is_empty() {
        return Err(Error::EmptyInput("runs"));
    }
    let per_run_mean_deg = errors
        .iter()
        .map(|e| {
            if e.is_empty() {
                Err(Error::EmptyInput("samples"))
            } else {
                Ok(e.iter().sum::<f64>() / e.len() as f64 * 180.0 / std::f64::consts::PI)
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    let m = per_run_mean_deg.len() as f64;
    let ae_deg = per_run_mean_deg.iter().sum::<f64>() / m;
    let sd_deg = if per_run_mean_deg.len() > 1 {
        let ss: f64 = per_run_mean_deg.iter().map(|x| (x - ae_deg).powi(2)).sum();
        (ss / (m - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(RunMetrics {
        ae_deg,
        sd_deg,
        per_run_mean_deg,
    })
}

/// Linear-interpolation percentile of sorted data, `p` in `[0, 100]`.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        1 => sorted[0],
        n => {
            let pos = p / 100.0 * (n - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = (lo + 1).min(n - 1);
            let t = pos - lo as f64;
            sorted[lo] * (1.0 - t) + sorted[hi] * t
        }
    }
}
