//! Reference trajectories for the Monte-Carlo studies.

use crate::error::{Error, Result};
use crate::harness::config::{Dynamics, TruthConfig};
use crate::so3::{exp_rot, log_rot, Mat3, Rotation, Vec3};

const RENORMALIZE_EVERY: usize = 1000;

/// Sampled attitude history. `rotations[k] = rotations[k-1] * exp(increments[k-1])`
/// holds exactly, so gyro samples built from the increments are consistent.
#[derive(Debug, Clone, PartialEq)]
pub struct Truth {
    pub h: f64,
    pub rotations: Vec<Rotation>,
    pub omegas: Vec<Vec3>,
    pub increments: Vec<Vec3>,
}

impl Truth {
    pub fn steps(&self) -> usize {
        self.increments.len()
    }
}

struct Body {
    inertia: Mat3,
    inertia_inv: Mat3,
    torque_arm: Option<Vec3>,
}

impl Body {
    fn new(cfg: &TruthConfig) -> Self {
        let inertia = Mat3::from_diagonal(&Vec3::from(cfg.inertia));
        let inertia_inv = Mat3::from_diagonal(&Vec3::from(cfg.inertia.map(|j| 1.0 / j)));
        let torque_arm = match cfg.dynamics {
            Dynamics::TorqueFree => None,
            Dynamics::Pendulum => Some(Vec3::from(cfg.com_offset) * (cfg.mass * cfg.gravity)),
        };
        Body {
            inertia,
            inertia_inv,
            torque_arm,
        }
    }

    fn accel(&self, r: &Rotation, w: &Vec3) -> Vec3 {
        let mut rhs = (self.inertia * w).cross(w);
        if let Some(arm) = self.torque_arm {
            // gravity acts along -e3 in the inertial frame
            rhs += arm.cross(&(r.matrix().transpose() * -Vec3::z()));
        }
        self.inertia_inv * rhs
    }

    /// One RK4 step of Euler's equations; the attitude follows the weighted stage rates.
    fn step(&self, r: &Rotation, w: &Vec3, dt: f64) -> (Rotation, Vec3) {
        let w1 = *w;
        let a1 = self.accel(r, &w1);
        let w2 = w + a1 * (dt / 2.0);
        let a2 = self.accel(&(*r * exp_rot(&(w1 * (dt / 2.0)))), &w2);
        let w3 = w + a2 * (dt / 2.0);
        let a3 = self.accel(&(*r * exp_rot(&(w2 * (dt / 2.0)))), &w3);
        let w4 = w + a3 * dt;
        let a4 = self.accel(&(*r * exp_rot(&(w3 * dt))), &w4);
        let w_next = w + (a1 + a2 * 2.0 + a3 * 2.0 + a4) * (dt / 6.0);
        let phi = (w1 + w2 * 2.0 + w3 * 2.0 + w4) * (dt / 6.0);
        (*r * exp_rot(&phi), w_next)
    }
}

/// Integrates the configured rigid body for `steps` samples of length `h`.
pub fn generate_truth(cfg: &TruthConfig, h: f64, steps: usize) -> Result<Truth> {
    let body = Body::new(cfg);
    let dt = h / cfg.substeps as f64;
    let mut r = exp_rot(&Vec3::from(cfg.initial_attitude));
    let mut w = Vec3::from(cfg.initial_omega);
    let mut rotations = Vec::with_capacity(steps + 1);
    let mut omegas = Vec::with_capacity(steps + 1);
    let mut increments = Vec::with_capacity(steps);
    rotations.push(r);
    omegas.push(w);
    for k in 1..=steps {
        let mut sub = r;
        for _ in 0..cfg.substeps {
            let (next_r, next_w) = body.step(&sub, &w, dt);
            sub = next_r;
            w = next_w;
        }
        let phi = log_rot(&(r.transpose() * sub))
            .map_err(|_| Error::Config("rotation per gyro sample is too close to pi".into()))?;
        r = r * exp_rot(&phi);
        if k % RENORMALIZE_EVERY == 0 {
            r = r.renormalized();
        }
        rotations.push(r);
        omegas.push(w);
        increments.push(phi);
    }
    Ok(Truth {
        h,
        rotations,
        omegas,
        increments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::so3::geodesic_angle;

    #[test]
    fn torque_free_body_conserves_energy_and_momentum() {
        let cfg = TruthConfig::default();
        let truth = generate_truth(&cfg, 0.02, 3000).unwrap();
        let j = Mat3::from_diagonal(&Vec3::from(cfg.inertia));
        let energy = |w: &Vec3| 0.5 * w.dot(&(j * w));
        let e0 = energy(&truth.omegas[0]);
        let h0 = truth.rotations[0] * (j * truth.omegas[0]);
        for (r, w) in truth.rotations.iter().zip(&truth.omegas).step_by(100) {
            assert!((energy(w) - e0).abs() < 1e-6 * e0);
            // inertial angular momentum is constant up to the attitude integration error
            assert!((*r * (j * w) - h0).norm() < 1e-3 * h0.norm());
        }
    }

    #[test]
    fn increments_reproduce_rotations() {
        let truth = generate_truth(&TruthConfig::default(), 0.02, 200).unwrap();
        for k in 1..=200 {
            let r = truth.rotations[k - 1] * exp_rot(&truth.increments[k - 1]);
            assert!(geodesic_angle(&r, &truth.rotations[k]) < 1e-12);
        }
    }

    #[test]
    fn pendulum_swings_under_gravity() {
        let cfg = TruthConfig {
            dynamics: Dynamics::Pendulum,
            com_offset: [0.0, 0.0, -0.5],
            initial_attitude: [0.3, 0.0, 0.0],
            initial_omega: [0.0; 3],
            ..TruthConfig::default()
        };
        let truth = generate_truth(&cfg, 0.02, 500).unwrap();
        let moved = truth.omegas.iter().map(|w| w.norm()).fold(0.0, f64::max);
        assert!(moved > 0.1);
        // total energy: rotational plus potential of the centre of mass
        let j = Mat3::from_diagonal(&Vec3::from(cfg.inertia));
        let c = Vec3::from(cfg.com_offset);
        let energy = |r: &Rotation, w: &Vec3| 0.5 * w.dot(&(j * w)) + cfg.mass * cfg.gravity * (*r * c).z;
        let e0 = energy(&truth.rotations[0], &truth.omegas[0]);
        for (r, w) in truth.rotations.iter().zip(&truth.omegas) {
            assert!((energy(r, w) - e0).abs() < 1e-4);
        }
    }
}
