//! Attitude filters driven by gyro increments and attitude or direction measurements.
//!
//! [`FnfFilter`] keeps a matrix Fisher belief in either error convention; the
//! prediction goes through the matching concentrated Gaussian and the update
//! multiplies MFD densities exactly. [`Iekf`] is the right-invariant Kalman
//! baseline.

mod fnf;
mod iekf;
mod wahba;

pub use fnf::{fnf_l_predict, fnf_l_update, fnf_predict, fnf_r_predict, fnf_r_update, fnf_update, FnfFilter};
pub use iekf::{iekf_step, Iekf};
pub use wahba::{meas_covariance, vector_measurement, wahba_svd, WahbaSolution, UNIQUENESS_TOL};

use crate::error::Result;
use crate::mfd::{covariance_to_mfd, Side};
use crate::so3::{Mat3, Rotation, Vec3};

/// One gyro sample: measured body rate over `dt` and the covariance `q` of the
/// rotation-vector noise accumulated over the interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GyroSample {
    pub omega: Vec3,
    pub dt: f64,
    pub q: Mat3,
}

impl GyroSample {
    pub fn increment(&self) -> Vec3 {
        self.omega * self.dt
    }
}

/// A known inertial direction and its noisy body-frame measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VectorObservation {
    pub reference: Vec3,
    pub measured: Vec3,
    pub cov: Mat3,
    pub weight: f64,
}

impl VectorObservation {
    /// Uses the weight `1 / tr(cov)`, or 1 for a noiseless observation.
    pub fn new(reference: Vec3, measured: Vec3, cov: Mat3) -> Self {
        let tr = cov.trace();
        let weight = if tr > 0.0 { 1.0 / tr } else { 1.0 };
        VectorObservation {
            reference,
            measured,
            cov,
            weight,
        }
    }

    pub fn with_weight(mut self, weight: f64) -> Self {
        self.weight = weight;
        self
    }
}

/// A full attitude measurement with MFD noise concentration `n` in the `side` convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttitudeMeasurement {
    pub rotation: Rotation,
    pub n: Mat3,
    pub side: Side,
}

impl AttitudeMeasurement {
    /// Measurement `R dR` with `dR ~ M(n_body)`, written for a filter of the given side.
    pub fn from_body_noise(rotation: Rotation, n_body: &Mat3, side: Side) -> Self {
        let n = match side {
            Side::Left => *n_body,
            Side::Right => {
                let r = rotation.matrix();
                r * n_body * r.transpose()
            }
        };
        AttitudeMeasurement { rotation, n, side }
    }

    /// Same as [`Self::from_body_noise`] for body-frame Gaussian noise with covariance `p_body`.
    pub fn from_body_gaussian(rotation: Rotation, p_body: &Mat3, side: Side) -> Result<Self> {
        Ok(Self::from_body_noise(rotation, &covariance_to_mfd(p_body)?, side))
    }
}
