//! Simulated gyro, direction and attitude sensors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::filters::{GyroSample, VectorObservation};
use crate::harness::config::{AttitudeNoise, DirectAttitudeConfig, VectorConfig};
use crate::harness::truth::Truth;
use crate::mfd::MfdSampler;
use crate::so3::{exp_rot, Mat3, Rotation, Vec3};

/// Independent random streams of one Monte-Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Gyro = 1,
    Vectors = 2,
    Attitude = 3,
}

/// Counter-based generator keyed by `(seed, run)` on the sensor's stream, so
/// runs are reproducible regardless of scheduling.
pub fn stream_rng(seed: u64, run: u64, stream: Stream) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&run.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(stream as u64);
    rng
}

fn normal3<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    Vec3::new(
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
    )
}

fn diag_sqrt(d: &[f64; 3]) -> Vec3 {
    Vec3::from(d.map(|v| v.max(0.0).sqrt()))
}

/// Gyro samples with `h * omega_tilde = phi - w`, `w ~ N(0, h sigma^2 I)`, where
/// `phi` is the exact truth increment.
pub fn simulate_gyro<R: Rng + ?Sized>(truth: &Truth, noise_density: f64, rng: &mut R) -> Vec<GyroSample> {
    let h = truth.h;
    let sd = noise_density * h.sqrt();
    let q = Mat3::identity() * (sd * sd);
    truth
        .increments
        .iter()
        .map(|phi| {
            let w = normal3(rng) * sd;
            GyroSample {
                omega: (phi - w) / h,
                dt: h,
                q,
            }
        })
        .collect()
}

/// Body-frame direction measurements `b = R^T e + v` every `stride` samples,
/// indexed like the truth rotations (entry 0 is never populated).
pub fn simulate_vectors<R: Rng + ?Sized>(
    truth: &Truth,
    cfg: &VectorConfig,
    stride: usize,
    rng: &mut R,
) -> Vec<Option<Vec<VectorObservation>>> {
    let cov = Mat3::from_diagonal(&Vec3::from(cfg.covariance));
    let sd = diag_sqrt(&cfg.covariance);
    let refs: Vec<Vec3> = cfg.references.iter().map(|e| Vec3::from(*e)).collect();
    truth
        .rotations
        .iter()
        .enumerate()
        .map(|(k, r)| {
            if k == 0 || k % stride != 0 {
                return None;
            }
            let rt = r.transpose();
            Some(
                refs.iter()
                    .enumerate()
                    .map(|(i, e)| {
                        let v = normal3(rng).component_mul(&sd);
                        let obs = VectorObservation::new(*e, rt * *e + v, cov);
                        match &cfg.weights {
                            Some(w) => obs.with_weight(w[i]),
                            None => obs,
                        }
                    })
                    .collect(),
            )
        })
        .collect()
}

/// Attitude measurements `R dR` every `stride` samples with body-frame noise.
pub fn simulate_direct_attitude<R: Rng + ?Sized>(
    truth: &Truth,
    cfg: &DirectAttitudeConfig,
    stride: usize,
    rng: &mut R,
) -> Result<Vec<Option<Rotation>>> {
    let mut sampler = match cfg.noise {
        AttitudeNoise::Mfd => {
            let n = cfg.concentration.unwrap_or([0.0; 3]).map(|v| v.min(1e6));
            Some(MfdSampler::new(&Mat3::from_diagonal(&Vec3::from(n))))
        }
        AttitudeNoise::Gaussian => None,
    };
    let sd = diag_sqrt(&cfg.covariance.unwrap_or([0.0; 3]));
    Ok(truth
        .rotations
        .iter()
        .enumerate()
        .map(|(k, r)| {
            if k == 0 || k % stride != 0 {
                return None;
            }
            let noise = match sampler.as_mut() {
                Some(s) => s.sample(rng),
                None => exp_rot(&normal3(rng).component_mul(&sd)),
            };
            Some(*r * noise)
        })
        .collect())
}

/// Concentration matching an isotropic direction distribution to a Gaussian
/// with mean `mu` and covariance `sigma`: `3 |mu|^2 / tr(sigma)`.
pub fn gaussian_dir_kappa(mu: &Vec3, sigma: &Mat3) -> f64 {
    3.0 * mu.norm_squared() / sigma.trace()
}
