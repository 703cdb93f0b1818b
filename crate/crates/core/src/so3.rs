//! Rotation group primitives: hat/vee, exponential and logarithm maps,
//! proper singular value decomposition and polar decompositions.

use std::ops::Mul;

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Default distance from pi below which the logarithm refuses to pick an axis.
pub const DEFAULT_PI_TOL: f64 = 1e-6;

const SMALL_ANGLE: f64 = 1e-4;
const ORTHO_TOL: f64 = 1e-9;

/// An element of SO(3) stored as a 3x3 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation(Mat3);

impl Rotation {
    pub fn identity() -> Self {
        Rotation(Mat3::identity())
    }

    /// Checks orthonormality and orientation before wrapping.
    pub fn from_matrix(m: Mat3) -> Result<Self> {
        let residual = (m.transpose() * m - Mat3::identity()).norm();
        let det = m.determinant();
        if residual > ORTHO_TOL || det <= 0.0 {
            return Err(Error::NotARotation { residual, det });
        }
        Ok(Rotation(m))
    }

    /// Wraps a matrix the caller knows to be a rotation.
    pub fn from_matrix_unchecked(m: Mat3) -> Self {
        Rotation(m)
    }

    pub fn exp(v: &Vec3) -> Self {
        exp_rot(v)
    }

    /// Rotation by `angle` about `axis` (normalized internally).
    pub fn from_axis_angle(axis: &Vec3, angle: f64) -> Self {
        exp_rot(&(axis.normalize() * angle))
    }

    pub fn log(&self) -> Result<Vec3> {
        log_rot(self)
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn into_inner(self) -> Mat3 {
        self.0
    }

    pub fn transpose(&self) -> Self {
        Rotation(self.0.transpose())
    }

    pub fn angle(&self) -> f64 {
        rotation_angle(&self.0)
    }

    /// Projects the stored matrix back onto SO(3).
    pub fn renormalized(&self) -> Self {
        orthonormalize(&self.0)
    }
}

impl Default for Rotation {
    fn default() -> Self {
        Self::identity()
    }
}

impl Mul for Rotation {
    type Output = Rotation;
    fn mul(self, rhs: Rotation) -> Rotation {
        Rotation(self.0 * rhs.0)
    }
}

impl Mul<&Rotation> for &Rotation {
    type Output = Rotation;
    fn mul(self, rhs: &Rotation) -> Rotation {
        Rotation(self.0 * rhs.0)
    }
}

impl Mul<Vec3> for Rotation {
    type Output = Vec3;
    fn mul(self, rhs: Vec3) -> Vec3 {
        self.0 * rhs
    }
}

impl Mul<&Vec3> for &Rotation {
    type Output = Vec3;
    fn mul(self, rhs: &Vec3) -> Vec3 {
        self.0 * rhs
    }
}

/// Skew-symmetric matrix with `hat(a) * b == a.cross(b)`.
pub fn hat(a: &Vec3) -> Mat3 {
    Mat3::new(0.0, -a.z, a.y, a.z, 0.0, -a.x, -a.y, a.x, 0.0)
}

/// Inverse of [`hat`]; reads the skew part of `m`.
pub fn vee(m: &Mat3) -> Vec3 {
    Vec3::new(m[(2, 1)], m[(0, 2)], m[(1, 0)])
}

/// Rodrigues exponential with a series expansion near zero.
pub fn exp_rot(v: &Vec3) -> Rotation {
    let theta2 = v.norm_squared();
    let theta = theta2.sqrt();
    let (a, b) = if theta < SMALL_ANGLE {
        (
            1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0,
            0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0,
        )
    } else {
        (theta.sin() / theta, (1.0 - theta.cos()) / theta2)
    };
    let k = hat(v);
    Rotation(Mat3::identity() + k * a + k * k * b)
}

/// Rotation angle in `[0, pi]` of a rotation matrix.
pub fn rotation_angle(r: &Mat3) -> f64 {
    let c = 0.5 * (r.trace() - 1.0);
    let s = 0.5 * vee(&(r - r.transpose())).norm();
    s.atan2(c)
}

pub fn log_rot(r: &Rotation) -> Result<Vec3> {
    log_rot_tol(r, DEFAULT_PI_TOL)
}

/// Logarithm map; fails when the angle is within `pi_tol` of pi.
pub fn log_rot_tol(r: &Rotation, pi_tol: f64) -> Result<Vec3> {
    let m = &r.0;
    let c = 0.5 * (m.trace() - 1.0);
    let w = 0.5 * vee(&(m - m.transpose()));
    let s = w.norm();
    let theta = s.atan2(c);
    if std::f64::consts::PI - theta < pi_tol {
        return Err(Error::AngleNearPi {
            angle: theta,
            tol: pi_tol,
        });
    }
    if theta < SMALL_ANGLE {
        let t2 = theta * theta;
        return Ok(w * (1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0));
    }
    if c > -0.9 {
        return Ok(w * (theta / s));
    }
    // Near pi the skew part is small; recover the axis from the symmetric part.
    let sym = 0.5 * (m + m.transpose());
    let outer = (sym - Mat3::identity() * c) / (1.0 - c);
    let j = (0..3)
        .max_by(|&a, &b| outer[(a, a)].total_cmp(&outer[(b, b)]))
        .unwrap_or(0);
    let mut axis: Vec3 = outer.column(j).into_owned() / outer[(j, j)].sqrt();
    axis.normalize_mut();
    if axis.dot(&w) < 0.0 {
        axis = -axis;
    }
    Ok(axis * theta)
}

/// Geodesic distance `||log(R1^T R2)||` in `[0, pi]`.
pub fn geodesic_angle(r1: &Rotation, r2: &Rotation) -> f64 {
    rotation_angle(&(r1.0.transpose() * r2.0))
}

/// `F = U diag(s) V^T` with `U, V` in SO(3), `s1 >= s2 >= |s3|`
/// and `sign(s3) == sign(det F)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProperSvd {
    pub u: Rotation,
    pub s: Vec3,
    pub v: Rotation,
}

impl ProperSvd {
    pub fn reconstruct(&self) -> Mat3 {
        self.u.0 * Mat3::from_diagonal(&self.s) * self.v.0.transpose()
    }

    /// `U V^T`, the attitude closest to `F` in Frobenius norm.
    pub fn rotation(&self) -> Rotation {
        Rotation(self.u.0 * self.v.0.transpose())
    }
}

pub fn proper_svd(f: &Mat3) -> ProperSvd {
    let svd = f.svd(true, true);
    let (Some(u), Some(v_t)) = (svd.u, svd.v_t) else {
        unreachable!("svd was asked for both factors")
    };
    let sv = svd.singular_values;
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));

    let v = v_t.transpose();
    let mut us = Mat3::zeros();
    let mut vs = Mat3::zeros();
    let mut s = Vec3::zeros();
    for (dst, &src) in order.iter().enumerate() {
        us.set_column(dst, &u.column(src));
        vs.set_column(dst, &v.column(src));
        s[dst] = sv[src];
    }
    let du = us.determinant().signum();
    let dv = vs.determinant().signum();
    for i in 0..3 {
        us[(i, 2)] *= du;
        vs[(i, 2)] *= dv;
    }
    s[2] *= du * dv;
    ProperSvd {
        u: Rotation(us),
        s,
        v: Rotation(vs),
    }
}

/// Right polar form `F = M K` with `M = U V^T`, `K = V S V^T`.
pub fn polar_right(f: &Mat3) -> (Rotation, Mat3) {
    let d = proper_svd(f);
    let v = d.v.0;
    (d.rotation(), v * Mat3::from_diagonal(&d.s) * v.transpose())
}

/// Left polar form `F = K' M'` with `K' = U S U^T`, `M' = U V^T`.
pub fn polar_left(f: &Mat3) -> (Mat3, Rotation) {
    let d = proper_svd(f);
    let u = d.u.0;
    (u * Mat3::from_diagonal(&d.s) * u.transpose(), d.rotation())
}

/// Nearest rotation to `m`.
pub fn orthonormalize(m: &Mat3) -> Rotation {
    proper_svd(m).rotation()
}

/// Wraps an angle to `[-pi, pi)`.
pub fn wrap_angle(a: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let w = (a + PI).rem_euclid(TAU) - PI;
    if w >= PI {
        w - TAU
    } else {
        w
    }
}
