use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::filters::{meas_covariance, wahba_svd, AttitudeMeasurement, FnfFilter, GyroSample, Iekf, VectorObservation};
use crate::harness::config::{FilterKind, Scenario};
use crate::harness::metrics::{compute_metrics, percentile, RunMetrics};
use crate::harness::sensors::{simulate_direct_attitude, simulate_gyro, simulate_vectors, stream_rng, Stream};
use crate::harness::truth::{generate_truth, Truth};
use crate::mfd::{covariance_to_mfd, mfd_to_covariance, Side};
use crate::so3::{exp_rot, geodesic_angle, polar_left, Mat3, Rotation, Vec3};

/// Scenario with its truth trajectory, shared by all runs.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub scenario: Scenario,
    pub truth: Truth,
    pub stride: usize,
    pub f0: Mat3,
}

impl Prepared {
    pub fn new(scenario: &Scenario) -> Result<Self> {
        scenario.validate()?;
        let truth = generate_truth(&scenario.truth, scenario.gyro_dt(), scenario.steps())?;
        let f = &scenario.filters;
        let f0 = exp_rot(&Vec3::from(f.initial_rotation)).into_inner() * f.initial_scale;
        Ok(Prepared {
            scenario: scenario.clone(),
            truth,
            stride: scenario.measurement_stride(),
            f0,
        })
    }
}

/// Per-sample output of one estimator in one run.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterTrace {
    /// Sample indices the errors refer to.
    pub k: Vec<usize>,
    /// Geodesic error `||log(R_hat^T R)||`, rad.
    pub errors: Vec<f64>,
    /// Square root of the first diagonal entry of the inertial-frame covariance, rad.
    pub uncertainty: Vec<f64>,
    pub cpu_s: f64,
    pub skipped_updates: usize,
}

impl FilterTrace {
    fn with_capacity(n: usize) -> Self {
        FilterTrace {
            k: Vec::with_capacity(n),
            errors: Vec::with_capacity(n),
            uncertainty: Vec::with_capacity(n),
            cpu_s: 0.0,
            skipped_updates: 0,
        }
    }

    fn push(&mut self, k: usize, err: f64, cov: Option<Mat3>) {
        self.k.push(k);
        self.errors.push(err);
        self.uncertainty
            .push(cov.map(|p| p[(0, 0)].max(0.0).sqrt()).unwrap_or(f64::NAN));
    }
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub run: usize,
    pub traces: Vec<(FilterKind, Result<FilterTrace>)>,
}

enum Measurements {
    Vectors(Vec<Option<Vec<VectorObservation>>>),
    Attitude {
        samples: Vec<Option<Rotation>>,
        n_body: Option<Mat3>,
        p_body: Option<Mat3>,
    },
}

struct Clock {
    enabled: bool,
    total: Duration,
}

impl Clock {
    fn time<T>(&mut self, f: impl FnOnce() -> T) -> T {
        if !self.enabled {
            return f();
        }
        let t = Instant::now();
        let out = f();
        self.total += t.elapsed();
        out
    }
}

/// Simulates sensors for run `run` and feeds every configured estimator.
/// Set `timing` to false where no monotonic clock exists.
pub fn simulate_run(prep: &Prepared, run: usize, timing: bool) -> Result<RunRecord> {
    let sc = &prep.scenario;
    let seed = sc.montecarlo.seed;
    let gyro = simulate_gyro(
        &prep.truth,
        sc.gyro.noise_density,
        &mut stream_rng(seed, run as u64, Stream::Gyro),
    );
    let meas = if let Some(v) = &sc.vectors {
        Measurements::Vectors(simulate_vectors(
            &prep.truth,
            v,
            prep.stride,
            &mut stream_rng(seed, run as u64, Stream::Vectors),
        ))
    } else if let Some(d) = &sc.direct_attitude {
        let diag = |x: Option<[f64; 3]>| x.map(|v| Mat3::from_diagonal(&Vec3::from(v)));
        Measurements::Attitude {
            samples: simulate_direct_attitude(
                &prep.truth,
                d,
                prep.stride,
                &mut stream_rng(seed, run as u64, Stream::Attitude),
            )?,
            n_body: diag(d.concentration),
            p_body: diag(d.covariance),
        }
    } else {
        return Err(Error::Config("no measurement source".into()));
    };

    let traces = sc
        .filters
        .kinds
        .iter()
        .map(|&kind| {
            let mut clock = Clock {
                enabled: timing,
                total: Duration::ZERO,
            };
            let out = match kind {
                FilterKind::FnfR => run_fnf(prep, Side::Right, &gyro, &meas, &mut clock),
                FilterKind::FnfL => run_fnf(prep, Side::Left, &gyro, &meas, &mut clock),
                FilterKind::Iekf => run_iekf(prep, &gyro, &meas, &mut clock),
                FilterKind::Meas => run_meas(prep, &meas, &mut clock),
            };
            let out = out.map(|mut t| {
                t.cpu_s = clock.total.as_secs_f64();
                t
            });
            (kind, out)
        })
        .collect();
    Ok(RunRecord { run, traces })
}

fn run_fnf(prep: &Prepared, side: Side, gyro: &[GyroSample], meas: &Measurements, clock: &mut Clock) -> Result<FilterTrace> {
    let truth = &prep.truth;
    let mut filter = FnfFilter::from_mfd(side, &prep.f0);
    let n_meas = match meas {
        Measurements::Attitude { n_body, p_body, .. } => Some(match (n_body, p_body) {
            (Some(n), _) => *n,
            (None, Some(p)) => covariance_to_mfd(p)?,
            (None, None) => return Err(Error::Config("no attitude noise model".into())),
        }),
        Measurements::Vectors(_) => None,
    };
    let mut trace = FilterTrace::with_capacity(gyro.len());
    for (i, g) in gyro.iter().enumerate() {
        let k = i + 1;
        clock.time(|| filter.predict(g))?;
        match meas {
            Measurements::Vectors(v) => {
                if let Some(obs) = &v[k] {
                    clock.time(|| filter.update_vectors(obs))?;
                }
            }
            Measurements::Attitude { samples, .. } => {
                if let (Some(rm), Some(n)) = (&samples[k], &n_meas) {
                    let m = AttitudeMeasurement::from_body_noise(*rm, n, side);
                    clock.time(|| filter.update_attitude(&m))?;
                }
            }
        }
        let err = geodesic_angle(&filter.belief.central, &truth.rotations[k]);
        trace.push(k, err, filter.belief.inertial_covariance().ok());
    }
    trace.skipped_updates = filter.skipped_updates;
    Ok(trace)
}

fn run_iekf(prep: &Prepared, gyro: &[GyroSample], meas: &Measurements, clock: &mut Clock) -> Result<FilterTrace> {
    let truth = &prep.truth;
    let (k0, m0) = polar_left(&prep.f0);
    let mut filter = Iekf::new(m0, mfd_to_covariance(&k0)?);
    let p_meas = match meas {
        Measurements::Attitude { n_body, p_body, .. } => Some(match (p_body, n_body) {
            (Some(p), _) => *p,
            (None, Some(n)) => mfd_to_covariance(n)?,
            (None, None) => return Err(Error::Config("no attitude noise model".into())),
        }),
        Measurements::Vectors(_) => None,
    };
    let mut trace = FilterTrace::with_capacity(gyro.len());
    for (i, g) in gyro.iter().enumerate() {
        let k = i + 1;
        clock.time(|| filter.predict(g));
        match meas {
            Measurements::Vectors(v) => {
                if let Some(obs) = &v[k] {
                    clock.time(|| filter.update_vectors(obs))?;
                }
            }
            Measurements::Attitude { samples, .. } => {
                if let (Some(rm), Some(p)) = (&samples[k], &p_meas) {
                    clock.time(|| filter.update_attitude(rm, p))?;
                }
            }
        }
        let err = geodesic_angle(&filter.rotation, &truth.rotations[k]);
        trace.push(k, err, Some(filter.cov));
    }
    Ok(trace)
}

fn run_meas(prep: &Prepared, meas: &Measurements, clock: &mut Clock) -> Result<FilterTrace> {
    let Measurements::Vectors(v) = meas else {
        return Err(Error::Config("the measurement-only estimator needs vectors".into()));
    };
    let mut trace = FilterTrace::with_capacity(v.len() / prep.stride.max(1) + 1);
    for (k, obs) in v.iter().enumerate() {
        let Some(obs) = obs else { continue };
        let solved = clock.time(|| {
            wahba_svd(obs).and_then(|sol| Ok((sol, meas_covariance(obs, &sol, Side::Right)?)))
        });
        match solved {
            Ok((sol, p)) => {
                let err = geodesic_angle(&sol.rotation, &prep.truth.rotations[k]);
                trace.push(k, err, Some(p));
            }
            Err(Error::NonUniqueSolution { .. }) => trace.skipped_updates += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(trace)
}

/// Cross-run statistics at one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesRow {
    pub t_s: f64,
    pub mean_err_deg: f64,
    pub p2_5_deg: f64,
    pub p97_5_deg: f64,
    pub mean_uncertainty_deg: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterReport {
    pub kind: FilterKind,
    /// `None` when every run failed.
    pub metrics: Option<RunMetrics>,
    pub cpu_s_mean: f64,
    pub failed_runs: usize,
    pub skipped_updates: usize,
    pub series: Vec<SeriesRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloReport {
    pub name: String,
    pub runs: usize,
    pub filters: Vec<FilterReport>,
}

impl MonteCarloReport {
    pub fn filter(&self, kind: FilterKind) -> Option<&FilterReport> {
        self.filters.iter().find(|f| f.kind == kind)
    }

    /// AE in degrees, `NaN` for a missing or fully failed filter.
    pub fn ae_deg(&self, kind: FilterKind) -> f64 {
        self.filter(kind)
            .and_then(|f| f.metrics.as_ref())
            .map_or(f64::NAN, |m| m.ae_deg)
    }
}

fn series(h: f64, traces: &[&FilterTrace]) -> Vec<SeriesRow> {
    let Some(first) = traces.first() else {
        return Vec::new();
    };
    (0..first.k.len())
        .map(|j| {
            let mut errs: Vec<f64> = traces.iter().map(|t| t.errors[j].to_degrees()).collect();
            errs.sort_by(f64::total_cmp);
            let unc: Vec<f64> = traces
                .iter()
                .map(|t| t.uncertainty[j])
                .filter(|u| u.is_finite())
                .collect();
            let mean_unc = if unc.is_empty() {
                f64::NAN
            } else {
                (unc.iter().sum::<f64>() / unc.len() as f64).to_degrees()
            };
            SeriesRow {
                t_s: first.k[j] as f64 * h,
                mean_err_deg: errs.iter().sum::<f64>() / errs.len() as f64,
                p2_5_deg: percentile(&errs, 2.5),
                p97_5_deg: percentile(&errs, 97.5),
                mean_uncertainty_deg: mean_unc,
            }
        })
        .collect()
}

/// Aggregates per-run records into per-filter summaries.
pub fn summarize(prep: &Prepared, records: &[RunRecord]) -> MonteCarloReport {
    let sc = &prep.scenario;
    let filters = sc
        .filters
        .kinds
        .iter()
        .enumerate()
        .map(|(idx, &kind)| {
            let ok: Vec<&FilterTrace> = records
                .iter()
                .filter_map(|r| r.traces[idx].1.as_ref().ok())
                .filter(|t| !t.errors.is_empty())
                .collect();
            let failed_runs = records.len() - ok.len();
            for r in records {
                if let Err(e) = &r.traces[idx].1 {
                    log::warn!("{kind} run {}: {e}", r.run);
                }
            }
            let errors: Vec<Vec<f64>> = ok.iter().map(|t| t.errors.clone()).collect();
            let metrics = compute_metrics(&errors).ok();
            let cpu_s_mean = if ok.is_empty() {
                f64::NAN
            } else {
                ok.iter().map(|t| t.cpu_s).sum::<f64>() / ok.len() as f64
            };
            FilterReport {
                kind,
                metrics,
                cpu_s_mean,
                failed_runs,
                skipped_updates: ok.iter().map(|t| t.skipped_updates).sum(),
                series: series(prep.truth.h, &ok),
            }
        })
        .collect();
    MonteCarloReport {
        name: sc.name.clone(),
        runs: records.len(),
        filters,
    }
}

fn run_all(prep: &Prepared) -> Result<Vec<RunRecord>> {
    let runs = prep.scenario.montecarlo.runs;
    let timing = prep.scenario.montecarlo.timing;
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let job = || {
            (0..runs)
                .into_par_iter()
                .map(|i| simulate_run(prep, i, timing))
                .collect::<Result<Vec<_>>>()
        };
        match prep.scenario.montecarlo.threads {
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(e.to_string()))?
                .install(job),
            None => job(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..runs).map(|i| simulate_run(prep, i, timing)).collect()
    }
}

/// Runs the whole study. Results do not depend on the number of threads.
pub fn run_monte_carlo(scenario: &Scenario) -> Result<MonteCarloReport> {
    let prep = Prepared::new(scenario)?;
    let records = run_all(&prep)?;
    Ok(summarize(&prep, &records))
}
