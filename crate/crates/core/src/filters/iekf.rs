use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::filters::{GyroSample, VectorObservation};
use crate::so3::{exp_rot, hat, log_rot, Mat3, Rotation, Vec3};

/// Right-invariant EKF: `R = exp(xi) R_hat` with `xi ~ N(0, cov)` in the inertial frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Iekf {
    pub rotation: Rotation,
    pub cov: Mat3,
}

impl Iekf {
    pub fn new(rotation: Rotation, cov: Mat3) -> Self {
        Iekf { rotation, cov }
    }

    pub fn predict(&mut self, gyro: &GyroSample) {
        let r = *self.rotation.matrix();
        self.cov += r * gyro.q * r.transpose();
        self.rotation = self.rotation * exp_rot(&gyro.increment());
    }

    /// Stacked update with `b = R^T e + v`, linearised as `H = R_hat^T e^`.
    pub fn update_vectors(&mut self, obs: &[VectorObservation]) -> Result<()> {
        if obs.is_empty() {
            return Err(Error::EmptyInput("vector observations"));
        }
        let m = 3 * obs.len();
        let rt = self.rotation.matrix().transpose();
        let mut h = DMatrix::<f64>::zeros(m, 3);
        let mut g = DMatrix::<f64>::zeros(m, m);
        let mut z = DVector::<f64>::zeros(m);
        for (i, o) in obs.iter().enumerate() {
            let hi = rt * hat(&o.reference);
            let zi = o.measured - rt * o.reference;
            h.view_mut((3 * i, 0), (3, 3)).copy_from(&hi);
            g.view_mut((3 * i, 3 * i), (3, 3)).copy_from(&o.cov);
            z.rows_mut(3 * i, 3).copy_from(&zi);
        }
        self.correct(&h, &g, &z)
    }

    /// Update with a full attitude `R dR`, `dR = exp(xi_b)`, `xi_b ~ N(0, p_body)`.
    pub fn update_attitude(&mut self, measured: &Rotation, p_body: &Mat3) -> Result<()> {
        let z = log_rot(&(*measured * self.rotation.transpose()))?;
        let r = self.rotation.matrix();
        let g = r * p_body * r.transpose();
        let h = DMatrix::<f64>::identity(3, 3);
        let g = DMatrix::from_iterator(3, 3, g.iter().copied());
        let z = DVector::from_iterator(3, z.iter().copied());
        self.correct(&h, &g, &z)
    }

    fn correct(&mut self, h: &DMatrix<f64>, g: &DMatrix<f64>, z: &DVector<f64>) -> Result<()> {
        let p = DMatrix::from_iterator(3, 3, self.cov.iter().copied());
        let s = h * &p * h.transpose() + g;
        let s_inv = s.try_inverse().ok_or(Error::SingularInnovation)?;
        let k = &p * h.transpose() * s_inv;
        let dx = &k * z;
        let p_new = (DMatrix::<f64>::identity(3, 3) - &k * h) * &p;
        let p_new = Mat3::from_iterator(p_new.iter().copied());
        self.cov = (p_new + p_new.transpose()) * 0.5;
        self.rotation = exp_rot(&Vec3::new(dx[0], dx[1], dx[2])) * self.rotation;
        Ok(())
    }
}

/// One predict step followed by an optional vector update.
pub fn iekf_step(state: &Iekf, gyro: &GyroSample, obs: Option<&[VectorObservation]>) -> Result<Iekf> {
    let mut next = *state;
    next.predict(gyro);
    if let Some(obs) = obs {
        next.update_vectors(obs)?;
    }
    Ok(next)
}
