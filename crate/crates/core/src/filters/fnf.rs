use crate::error::{Error, Result};
use crate::filters::{vector_measurement, AttitudeMeasurement, GyroSample, VectorObservation};
use crate::mfd::{covariance_to_mfd, mfd_to_covariance, InvariantBelief, Side};
use crate::so3::{exp_rot, polar_left, polar_right, Mat3};

fn require(side: Side, got: Side) -> Result<()> {
    if side == got {
        Ok(())
    } else {
        Err(Error::SideMismatch)
    }
}

fn symmetric(m: Mat3) -> Mat3 {
    (m + m.transpose()) * 0.5
}

/// Prediction for the inertial-frame error convention.
pub fn fnf_r_predict(belief: &InvariantBelief, gyro: &GyroSample) -> Result<InvariantBelief> {
    require(Side::Right, belief.side)?;
    let r = belief.central.matrix();
    let p = mfd_to_covariance(&belief.n)? + r * gyro.q * r.transpose();
    Ok(InvariantBelief::new(
        Side::Right,
        belief.central * exp_rot(&gyro.increment()),
        covariance_to_mfd(&symmetric(p))?,
    ))
}

/// Prediction for the body-frame error convention.
pub fn fnf_l_predict(belief: &InvariantBelief, gyro: &GyroSample) -> Result<InvariantBelief> {
    require(Side::Left, belief.side)?;
    let step = exp_rot(&gyro.increment());
    let e = step.matrix();
    let p = e.transpose() * mfd_to_covariance(&belief.n)? * e + gyro.q;
    Ok(InvariantBelief::new(
        Side::Left,
        belief.central * step,
        covariance_to_mfd(&symmetric(p))?,
    ))
}

/// Exact MFD product update for the inertial-frame convention: `F = Nm Rm + N R`.
pub fn fnf_r_update(belief: &InvariantBelief, meas: &AttitudeMeasurement) -> Result<InvariantBelief> {
    require(Side::Right, belief.side)?;
    require(Side::Right, meas.side)?;
    let f = meas.n * meas.rotation.matrix() + belief.n * belief.central.matrix();
    let (k, m) = polar_left(&f);
    Ok(InvariantBelief::new(Side::Right, m, symmetric(k)))
}

/// Exact MFD product update for the body-frame convention: `F = Rm Nm + R N`.
pub fn fnf_l_update(belief: &InvariantBelief, meas: &AttitudeMeasurement) -> Result<InvariantBelief> {
    require(Side::Left, belief.side)?;
    require(Side::Left, meas.side)?;
    let f = meas.rotation.matrix() * meas.n + belief.central.matrix() * belief.n;
    let (m, k) = polar_right(&f);
    Ok(InvariantBelief::new(Side::Left, m, symmetric(k)))
}

pub fn fnf_predict(belief: &InvariantBelief, gyro: &GyroSample) -> Result<InvariantBelief> {
    match belief.side {
        Side::Right => fnf_r_predict(belief, gyro),
        Side::Left => fnf_l_predict(belief, gyro),
    }
}

pub fn fnf_update(belief: &InvariantBelief, meas: &AttitudeMeasurement) -> Result<InvariantBelief> {
    match belief.side {
        Side::Right => fnf_r_update(belief, meas),
        Side::Left => fnf_l_update(belief, meas),
    }
}

/// Stateful wrapper around the predict and update steps.
#[derive(Debug, Clone, PartialEq)]
pub struct FnfFilter {
    pub belief: InvariantBelief,
    pub skipped_updates: usize,
}

impl FnfFilter {
    pub fn new(belief: InvariantBelief) -> Self {
        FnfFilter {
            belief,
            skipped_updates: 0,
        }
    }

    /// Initial belief from an MFD parameter.
    pub fn from_mfd(side: Side, f: &Mat3) -> Self {
        Self::new(InvariantBelief::from_mfd(side, f))
    }

    pub fn side(&self) -> Side {
        self.belief.side
    }

    pub fn predict(&mut self, gyro: &GyroSample) -> Result<()> {
        self.belief = fnf_predict(&self.belief, gyro)?;
        Ok(())
    }

    pub fn update_attitude(&mut self, meas: &AttitudeMeasurement) -> Result<()> {
        self.belief = fnf_update(&self.belief, meas)?;
        Ok(())
    }

    /// Converts the vectors into an attitude measurement and fuses it. Returns
    /// `false` and counts a skip when the least-squares attitude is not unique.
    pub fn update_vectors(&mut self, obs: &[VectorObservation]) -> Result<bool> {
        match vector_measurement(obs, self.side()) {
            Ok((_, _, meas)) => {
                self.update_attitude(&meas)?;
                Ok(true)
            }
            Err(Error::NonUniqueSolution { .. }) | Err(Error::NotPositiveDefinite { .. }) => {
                self.skipped_updates += 1;
                Ok(false)
            }
            Err(e) => Err(e),
        }
    }
}
