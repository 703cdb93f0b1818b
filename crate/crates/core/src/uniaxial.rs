//! Single-axis reduction of the inertial-frame filter and its stability certificate.
//!
//! For rotations about one body axis with diagonal concentrations, the filter
//! collapses to a scalar recursion on `(theta_hat, kappa, kappa_star)`, where
//! `kappa` is the concentration about the rotation axis seen on the subset and
//! `kappa_star` is the remaining diagonal entry.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mechanism::fuse_mfd_1d;
use crate::so3::wrap_angle;

/// Squared angle (rad^2) treated as numerically zero when comparing error measures.
pub const ERROR_FLOOR: f64 = 1e-26;
const REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniaxialState {
    pub theta_hat: f64,
    pub kappa: f64,
    pub kappa_star: f64,
}

/// Propagation with gyro rate `omega` over `h`, noise variances `sigma` about the
/// axis and `sigma_star` about the other two axes.
pub fn uniaxial_predict(s: &UniaxialState, omega: f64, h: f64, sigma: f64, sigma_star: f64) -> UniaxialState {
    let kappa = s.kappa / (1.0 + 2.0 * s.kappa * sigma);
    let total = s.kappa + s.kappa_star;
    UniaxialState {
        theta_hat: wrap_angle(s.theta_hat + omega * h),
        kappa,
        kappa_star: total / (1.0 + sigma_star * total) - kappa,
    }
}

pub fn uniaxial_update(s: &UniaxialState, theta_m: f64, kappa_m: f64, kappa_m_star: f64) -> UniaxialState {
    let post = fuse_mfd_1d(s.kappa, kappa_m, wrap_angle(theta_m - s.theta_hat));
    UniaxialState {
        theta_hat: wrap_angle(s.theta_hat + post.theta_bar),
        kappa: post.kappa,
        kappa_star: s.kappa_star + kappa_m_star,
    }
}

/// `2 (1 - cos(theta - theta_hat))`, the error measure used by the certificate.
pub fn error_measure(theta: f64, theta_hat: f64) -> f64 {
    let half = 0.5 * wrap_angle(theta - theta_hat);
    4.0 * half.sin().powi(2)
}

/// `V = kappa (1 - cos(theta - theta_hat))`.
pub fn lyapunov(s: &UniaxialState, theta: f64) -> f64 {
    0.5 * s.kappa * error_measure(theta, s.theta_hat)
}

/// Bounds `alpha1 < sigma_k < alpha2`, `beta1 < kappa_m < beta2` and the
/// initial error margin `epsilon`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityConstants {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl StabilityConstants {
    pub fn new(alpha1: f64, alpha2: f64, beta1: f64, beta2: f64, epsilon: f64) -> Result<Self> {
        let c = StabilityConstants {
            alpha1,
            alpha2,
            beta1,
            beta2,
            epsilon,
        };
        c.validate()?;
        Ok(c)
    }

    /// `alpha = (0.001, 0.01)`, `beta = (50, 200)`, `epsilon = 0.1`.
    pub fn reference() -> Self {
        StabilityConstants {
            alpha1: 0.001,
            alpha2: 0.01,
            beta1: 50.0,
            beta2: 200.0,
            epsilon: 0.1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.alpha1 > 0.0
            && self.alpha2 > self.alpha1
            && self.beta1 > 0.0
            && self.beta2 > self.beta1
            && (0.0..4.0).contains(&self.epsilon);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConstants(format!("{self:?}")))
        }
    }

    fn root(&self) -> f64 {
        (self.epsilon - self.epsilon * self.epsilon / 4.0).sqrt()
    }

    pub fn gamma1(&self) -> f64 {
        self.beta1 * self.root()
    }

    pub fn gamma2(&self) -> f64 {
        let a = 1.0 / (2.0 * self.alpha1);
        let e = self.epsilon * a;
        let t1 = ((a - self.beta1).powi(2) + self.beta1 * e).sqrt();
        let t2 = ((a - self.beta2).powi(2) + self.beta2 * e).sqrt();
        self.beta2.max(t1).max(t2)
    }

    /// Per-step contraction factor of the bound.
    pub fn rate(&self) -> f64 {
        1.0 + 2.0 * self.alpha2 * self.gamma1()
    }

    /// `kappa0 / gamma2 * rate^-k * e0`.
    pub fn bound(&self, k: usize, kappa0: f64, e0: f64) -> f64 {
        kappa0 / self.gamma2() * self.rate().powi(-(k as i32)) * e0
    }

    /// Same as [`Self::bound`] with `gamma1` in the constant.
    pub fn bound_gamma1(&self, k: usize, kappa0: f64, e0: f64) -> f64 {
        kappa0 / self.gamma1() * self.rate().powi(-(k as i32)) * e0
    }
}

/// One step of a noise-free single-axis run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniaxialStep {
    pub theta: f64,
    pub sigma: f64,
    pub kappa_m: f64,
    pub prior: UniaxialState,
    pub posterior: UniaxialState,
}

/// A run starting from `initial` at truth `theta0`; `steps[k-1]` is step `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct UniaxialRun {
    pub theta0: f64,
    pub initial: UniaxialState,
    pub steps: Vec<UniaxialStep>,
}

/// How random certificate runs are drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialSpec {
    pub constants: StabilityConstants,
    pub steps: usize,
    pub h: f64,
    /// Range for the initial concentration.
    pub kappa0: (f64, f64),
    /// Fixed initial error measure; drawn uniformly from `[0, 4 - epsilon]` when `None`.
    pub initial_error: Option<f64>,
    /// Fixed `(sigma, kappa_m)`; drawn uniformly inside the bounds when `None`.
    pub constant_inputs: Option<(f64, f64)>,
}

impl TrialSpec {
    pub fn new(constants: StabilityConstants, steps: usize) -> Self {
        TrialSpec {
            constants,
            steps,
            h: 0.01,
            kappa0: (0.5, 2.0),
            initial_error: None,
            constant_inputs: None,
        }
    }
}

/// Runs the scalar filter on a random noise-free single-axis trajectory.
pub fn simulate_uniaxial<R: Rng + ?Sized>(spec: &TrialSpec, rng: &mut R) -> UniaxialRun {
    use std::f64::consts::PI;
    let c = &spec.constants;
    let theta0 = rng.random_range(-PI..PI);
    let e0 = spec
        .initial_error
        .unwrap_or_else(|| rng.random_range(0.0..=4.0 - c.epsilon));
    let mag = (1.0 - e0 / 2.0).clamp(-1.0, 1.0).acos();
    let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
    let (k_lo, k_hi) = spec.kappa0;
    let kappa0 = if k_hi > k_lo {
        rng.random_range(k_lo..k_hi)
    } else {
        k_lo
    };
    let initial = UniaxialState {
        theta_hat: wrap_angle(theta0 - sign * mag),
        kappa: kappa0,
        kappa_star: kappa0,
    };
    let mut theta = theta0;
    let mut state = initial;
    let mut steps = Vec::with_capacity(spec.steps);
    for _ in 0..spec.steps {
        let (sigma, kappa_m) = spec.constant_inputs.unwrap_or_else(|| {
            (
                rng.random_range(c.alpha1..c.alpha2),
                rng.random_range(c.beta1..c.beta2),
            )
        });
        let omega = rng.random_range(-1.0..1.0);
        theta = wrap_angle(theta + omega * spec.h);
        let prior = uniaxial_predict(&state, omega, spec.h, sigma, sigma);
        let posterior = uniaxial_update(&prior, theta, kappa_m, kappa_m);
        steps.push(UniaxialStep {
            theta,
            sigma,
            kappa_m,
            prior,
            posterior,
        });
        state = posterior;
    }
    UniaxialRun {
        theta0,
        initial,
        steps,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificateStep {
    pub k: usize,
    /// Wrapped `theta - theta_hat`, rad.
    pub theta_err: f64,
    pub kappa: f64,
    pub v: f64,
    pub error: f64,
    pub bound: f64,
    pub bound_gamma1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    Bound,
    ErrorIncrease,
    LyapunovIncrease,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    pub step: usize,
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    pub steps: Vec<CertificateStep>,
    pub violations: Vec<Violation>,
    /// Steps where the error exceeds the `gamma1` variant of the bound.
    pub gamma1_violations: usize,
}

impl CertificateReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the exponential bound for `k >= 1` and the monotone decrease of the
/// error and of `V` at every step. Values below [`ERROR_FLOOR`] count as zero.
pub fn evaluate_certificate(run: &UniaxialRun, c: &StabilityConstants) -> CertificateReport {
    let kappa0 = run.initial.kappa;
    let e0 = error_measure(run.theta0, run.initial.theta_hat);
    let mut steps = vec![CertificateStep {
        k: 0,
        theta_err: wrap_angle(run.theta0 - run.initial.theta_hat),
        kappa: kappa0,
        v: lyapunov(&run.initial, run.theta0),
        error: e0,
        bound: c.bound(0, kappa0, e0),
        bound_gamma1: c.bound_gamma1(0, kappa0, e0),
    }];
    let mut violations = Vec::new();
    let mut gamma1_violations = 0;
    let mut prev_state = run.initial;
    let mut prev = steps[0];
    for (i, st) in run.steps.iter().enumerate() {
        let k = i + 1;
        let error = error_measure(st.theta, st.posterior.theta_hat);
        let cur = CertificateStep {
            k,
            theta_err: wrap_angle(st.theta - st.posterior.theta_hat),
            kappa: st.posterior.kappa,
            v: lyapunov(&st.posterior, st.theta),
            error,
            bound: c.bound(k, kappa0, e0),
            bound_gamma1: c.bound_gamma1(k, kappa0, e0),
        };
        let above = |limit: f64| error > limit * (1.0 + REL_TOL) && error > ERROR_FLOOR;
        if above(cur.bound) {
            violations.push(Violation {
                step: k,
                kind: ViolationKind::Bound,
            });
        }
        if above(cur.bound_gamma1) {
            gamma1_violations += 1;
        }
        if above(prev.error) {
            violations.push(Violation {
                step: k,
                kind: ViolationKind::ErrorIncrease,
            });
        }
        let v_limit = prev.v / (1.0 + 2.0 * prev_state.kappa * st.sigma);
        if cur.v > v_limit * (1.0 + REL_TOL) + cur.kappa * ERROR_FLOOR {
            violations.push(Violation {
                step: k,
                kind: ViolationKind::LyapunovIncrease,
            });
        }
        steps.push(cur);
        prev = cur;
        prev_state = st.posterior;
    }
    CertificateReport {
        steps,
        violations,
        gamma1_violations,
    }
}

/// [`evaluate_certificate`] returning the first violation as an error.
pub fn stability_certificate(run: &UniaxialRun, c: &StabilityConstants) -> Result<CertificateReport> {
    let report = evaluate_certificate(run, c);
    if let Some(v) = report.violations.first() {
        return Err(Error::CertificateViolation {
            step: v.step,
            what: format!("{:?}", v.kind),
        });
    }
    Ok(report)
}

/// Runs `trials` independent random runs from `seed` and checks each one.
pub fn stability_trials(spec: &TrialSpec, trials: usize, seed: u64) -> Vec<CertificateReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials)
        .map(|_| evaluate_certificate(&simulate_uniaxial(spec, &mut rng), &spec.constants))
        .collect()
}
