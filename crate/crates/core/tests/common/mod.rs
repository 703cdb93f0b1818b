#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use mfd_attitude::so3::{exp_rot, Mat3, Rotation, Vec3};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Asymptotic Kolmogorov tail probability with the usual small-sample correction.
fn kolmogorov_p(d: f64, n_eff: f64) -> f64 {
    let s = n_eff.sqrt();
    let lambda = (s + 0.12 + 0.11 / s) * d;
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..200 {
        let j = j as f64;
        let term = 2.0 * (-1.0f64).powf(j - 1.0) * (-2.0 * j * j * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-12 {
            break;
        }
    }
    sum.clamp(0.0, 1.0)
}

/// One-sample KS test p-value against `cdf`.
pub fn ks_one_sample(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in xs.iter().enumerate() {
        let f = cdf(*x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    kolmogorov_p(d, n)
}

/// Two-sample KS test p-value.
pub fn ks_two_sample(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    kolmogorov_p(d, na * nb / (na + nb))
}

pub fn random_rotation(rng: &mut ChaCha8Rng) -> Rotation {
    let mut q = [0.0f64; 4];
    q.iter_mut().for_each(|v| *v = rng.sample(StandardNormal));
    let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
    let [w, x, y, z] = q.map(|v| v / n);
    Rotation::from_matrix_unchecked(Mat3::new(
        1.0 - 2.0 * (y * y + z * z),
        2.0 * (x * y - w * z),
        2.0 * (x * z + w * y),
        2.0 * (x * y + w * z),
        1.0 - 2.0 * (x * x + z * z),
        2.0 * (y * z - w * x),
        2.0 * (x * z - w * y),
        2.0 * (y * z + w * x),
        1.0 - 2.0 * (x * x + y * y),
    ))
}

pub fn random_vec(rng: &mut ChaCha8Rng, scale: f64) -> Vec3 {
    Vec3::new(
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
    ) * scale
}

pub fn gaussian_vec(rng: &mut ChaCha8Rng, sd: f64) -> Vec3 {
    Vec3::new(
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
    ) * sd
}

pub fn small_rotation(rng: &mut ChaCha8Rng, sd: f64) -> Rotation {
    exp_rot(&gaussian_vec(rng, sd))
}

/// Posterior of two von Mises factors found numerically: the log of the product
/// density is tabulated on a uniform grid of spacing about `step` and its first
/// Fourier harmonic gives `kappa` (modulus) and `theta` (argument).
pub struct GridFusion {
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl GridFusion {
    pub fn new(step: f64) -> Self {
        let n = (TAU / step).ceil() as usize;
        let dx = TAU / n as f64;
        let theta: Vec<f64> = (0..n).map(|i| -PI + i as f64 * dx).collect();
        GridFusion {
            cos: theta.iter().map(|t| t.cos()).collect(),
            sin: theta.iter().map(|t| t.sin()).collect(),
        }
    }

    pub fn fuse(&self, kappa_prior: f64, kappa_meas: f64, dtheta: f64) -> (f64, f64) {
        let (cd, sd) = (dtheta.cos(), dtheta.sin());
        let (mut a, mut b) = (0.0, 0.0);
        for (c, s) in self.cos.iter().zip(&self.sin) {
            // log prior + log likelihood, cos(theta - dtheta) by angle addition
            let log_p = kappa_prior * c + kappa_meas * (c * cd + s * sd);
            a += log_p * c;
            b += log_p * s;
        }
        let scale = 2.0 / self.cos.len() as f64;
        let (a, b) = (a * scale, b * scale);
        (a.hypot(b), b.atan2(a))
    }
}
