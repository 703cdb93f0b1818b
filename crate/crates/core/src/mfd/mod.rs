//! Matrix Fisher distributions on SO(3), their invariant (central attitude plus
//! concentration) form, and the conversion to and from concentrated Gaussians.

mod sampling;

pub use sampling::{sample_mfd, MfdSampler};

use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};
use crate::so3::{polar_left, polar_right, proper_svd, Mat3, ProperSvd, Rotation, Vec3};

const DEGENERATE_TOL: f64 = 1e-12;

/// Pairwise sum below which the Gaussian approximation of an MFD is considered coarse.
pub const COARSE_APPROX_SUM: f64 = 5.0;

/// Which side the error rotation multiplies the central attitude from.
///
/// `Right` means `R = dR * R_hat` (error expressed in the inertial frame),
/// `Left` means `R = R_hat * dR` (error expressed in the body frame).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// Matrix Fisher distribution with density proportional to `etr(F^T R)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixFisher {
    pub f: Mat3,
}

impl MatrixFisher {
    pub fn new(f: Mat3) -> Self {
        MatrixFisher { f }
    }

    /// `s * exp(rotvec)`, the family used for initial conditions.
    pub fn scaled_rotation(scale: f64, rotation: &Rotation) -> Self {
        MatrixFisher::new(rotation.matrix() * scale)
    }

    pub fn svd(&self) -> ProperSvd {
        proper_svd(&self.f)
    }

    pub fn mean_attitude(&self) -> Rotation {
        polar_right(&self.f).0
    }

    pub fn log_density_unnormalized(&self, r: &Rotation) -> f64 {
        unnormalized_log_density(&self.f, r)
    }

    /// Distribution of `Rl * R * Rr` when `R` follows `self`.
    pub fn rotate(&self, rl: &Rotation, rr: &Rotation) -> Self {
        rotate_mfd(&self.f, rl, rr)
    }

    /// Distribution of `R^T` when `R` follows `self`.
    pub fn transpose(&self) -> Self {
        transpose_mfd(&self.f)
    }
}

pub fn unnormalized_log_density(f: &Mat3, r: &Rotation) -> f64 {
    f.dot(r.matrix())
}

pub fn rotate_mfd(f: &Mat3, rl: &Rotation, rr: &Rotation) -> MatrixFisher {
    MatrixFisher::new(rl.matrix() * f * rr.matrix())
}

pub fn transpose_mfd(f: &Mat3) -> MatrixFisher {
    MatrixFisher::new(f.transpose())
}

/// Central attitude and symmetric concentration of an invariant MFD belief.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantBelief {
    pub side: Side,
    pub central: Rotation,
    pub n: Mat3,
}

impl InvariantBelief {
    pub fn new(side: Side, central: Rotation, n: Mat3) -> Self {
        InvariantBelief { side, central, n }
    }

    /// Splits an MFD parameter with the polar form matching `side`.
    pub fn from_mfd(side: Side, f: &Mat3) -> Self {
        match side {
            Side::Right => {
                let (k, m) = polar_left(f);
                InvariantBelief::new(side, m, k)
            }
            Side::Left => {
                let (m, k) = polar_right(f);
                InvariantBelief::new(side, m, k)
            }
        }
    }

    pub fn from_covariance(side: Side, central: Rotation, p: &Mat3) -> Result<Self> {
        Ok(InvariantBelief::new(side, central, covariance_to_mfd(p)?))
    }

    pub fn to_mfd(&self) -> MatrixFisher {
        match self.side {
            Side::Right => MatrixFisher::new(self.n * self.central.matrix()),
            Side::Left => MatrixFisher::new(self.central.matrix() * self.n),
        }
    }

    /// Concentrated-Gaussian covariance of the error in the belief's own frame.
    pub fn covariance(&self) -> Result<Mat3> {
        mfd_to_covariance(&self.n)
    }

    /// Error covariance expressed in the inertial frame.
    pub fn inertial_covariance(&self) -> Result<Mat3> {
        let p = self.covariance()?;
        Ok(match self.side {
            Side::Right => p,
            Side::Left => {
                let r = self.central.matrix();
                r * p * r.transpose()
            }
        })
    }
}

/// Gaussian in exponential coordinates around `mean`; `side` as in [`Side`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcentratedGaussian {
    pub side: Side,
    pub mean: Rotation,
    pub cov: Mat3,
}

impl ConcentratedGaussian {
    pub fn new(side: Side, mean: Rotation, cov: Mat3) -> Self {
        ConcentratedGaussian { side, mean, cov }
    }
}

struct SortedEigen {
    vectors: Mat3,
    values: Vec3,
}

fn sorted_symmetric_eigen(m: &Mat3) -> SortedEigen {
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mut vectors = Mat3::zeros();
    let mut values = Vec3::zeros();
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
        values[dst] = eig.eigenvalues[src];
    }
    if vectors.determinant() < 0.0 {
        let c = -vectors.column(2);
        vectors.set_column(2, &c);
    }
    SortedEigen { vectors, values }
}

/// True when the smallest pairwise sum of `N` is below [`COARSE_APPROX_SUM`].
pub fn gaussian_approximation_is_coarse(n: &Mat3) -> bool {
    let s = sorted_symmetric_eigen(n).values;
    s[1] + s[2] < COARSE_APPROX_SUM
}

/// Covariance of the Gaussian matching a symmetric concentration `N = V S V^T`:
/// `P = V (tr(S) I - S)^-1 V^T`.
pub fn mfd_to_covariance(n: &Mat3) -> Result<Mat3> {
    let SortedEigen { vectors, values: s } = sorted_symmetric_eigen(n);
    let sums = Vec3::new(s[1] + s[2], s[0] + s[2], s[0] + s[1]);
    let min = sums.min();
    if min <= DEGENERATE_TOL {
        return Err(Error::DegenerateConcentration { sum: min });
    }
    if min < COARSE_APPROX_SUM {
        log::debug!("low concentration ({min:.3}); Gaussian approximation is coarse");
    }
    let inv = Vec3::new(1.0 / sums[0], 1.0 / sums[1], 1.0 / sums[2]);
    Ok(vectors * Mat3::from_diagonal(&inv) * vectors.transpose())
}

/// Inverse of [`mfd_to_covariance`]: `N = U (tr(L^-1) I / 2 - L^-1) U^T` for `P = U L U^T`.
pub fn covariance_to_mfd(p: &Mat3) -> Result<Mat3> {
    let SortedEigen { vectors, values } = sorted_symmetric_eigen(p);
    let min = values.min();
    if !(min > 0.0) || !min.is_finite() {
        return Err(Error::NotPositiveDefinite { min_eig: min });
    }
    let inv = values.map(|l| 1.0 / l);
    let half_trace = 0.5 * inv.sum();
    let n = inv.map(|i| half_trace - i);
    Ok(vectors * Mat3::from_diagonal(&n) * vectors.transpose())
}
