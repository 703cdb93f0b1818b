use crate::error::{Error, Result};
use crate::filters::{AttitudeMeasurement, VectorObservation};
use crate::mfd::{covariance_to_mfd, Side};
use crate::so3::{hat, proper_svd, Mat3, ProperSvd, Rotation, Vec3};

/// Relative bound on `(s2 + s3) / s1` below which the attitude is not unique.
pub const UNIQUENESS_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WahbaSolution {
    pub rotation: Rotation,
    pub svd: ProperSvd,
    /// `L = sum w e b^T`
    pub l: Mat3,
}

/// Weighted least-squares attitude maximising `tr(R^T L)`.
pub fn wahba_svd(obs: &[VectorObservation]) -> Result<WahbaSolution> {
    if obs.is_empty() {
        return Err(Error::EmptyInput("vector observations"));
    }
    let l = obs.iter().fold(Mat3::zeros(), |acc, o| {
        acc + o.reference * o.measured.transpose() * o.weight
    });
    let svd = proper_svd(&l);
    let sum = svd.s[1] + svd.s[2];
    if sum <= UNIQUENESS_TOL * svd.s[0].max(f64::MIN_POSITIVE) {
        return Err(Error::NonUniqueSolution { sum });
    }
    Ok(WahbaSolution {
        rotation: svd.rotation(),
        svd,
        l,
    })
}

/// First-order covariance of the least-squares attitude error in the `side` convention.
pub fn meas_covariance(obs: &[VectorObservation], sol: &WahbaSolution, side: Side) -> Result<Mat3> {
    let s = sol.svd.s;
    let sums = Vec3::new(s[1] + s[2], s[0] + s[2], s[0] + s[1]);
    if sums.min() <= 0.0 {
        return Err(Error::NonUniqueSolution { sum: sums.min() });
    }
    let inv = Mat3::from_diagonal(&sums.map(|v| 1.0 / v));
    let r = sol.rotation.matrix();
    let p = match side {
        Side::Right => {
            // (tr(L R^T) I - L R^T)^-1 = U (tr S I - S)^-1 U^T
            let u = sol.svd.u.matrix();
            let a_inv = u * inv * u.transpose();
            obs.iter().fold(Mat3::zeros(), |acc, o| {
                let j = a_inv * hat(&o.reference) * r * o.weight;
                acc + j * o.cov * j.transpose()
            })
        }
        Side::Left => {
            let v = sol.svd.v.matrix();
            let b_inv = v * inv * v.transpose();
            obs.iter().fold(Mat3::zeros(), |acc, o| {
                let j = b_inv * hat(&(r.transpose() * o.reference)) * o.weight;
                acc + j * o.cov * j.transpose()
            })
        }
    };
    Ok((p + p.transpose()) * 0.5)
}

/// Least-squares attitude packaged as an MFD measurement for a filter of the given side.
pub fn vector_measurement(obs: &[VectorObservation], side: Side) -> Result<(WahbaSolution, Mat3, AttitudeMeasurement)> {
    let sol = wahba_svd(obs)?;
    let p = meas_covariance(obs, &sol, side)?;
    let n = covariance_to_mfd(&p)?;
    Ok((
        sol,
        p,
        AttitudeMeasurement {
            rotation: sol.rotation,
            n,
            side,
        },
    ))
}
