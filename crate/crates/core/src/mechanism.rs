//! One-dimensional fusion along a geodesic subset `R(theta) = M0 exp(theta w^)`.
//!
//! Restricted to such a subset, an MFD has a von Mises density
//! `exp(kappa cos(theta - theta_bar))` and a concentrated Gaussian has a wrapped
//! normal density with concentration `kappa = 1 / variance`. Bayesian fusion of two
//! von Mises factors adds their phasors; Gaussian fusion adds concentrations.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::mfd::{ConcentratedGaussian, Side};
use crate::so3::{exp_rot, geodesic_angle, log_rot, polar_right, wrap_angle, Mat3, Rotation, Vec3};

const SUBSET_TOL: f64 = 1e-6;
const COINCIDENT_TOL: f64 = 1e-9;

/// Geodesic subset through `base` generated by the unit body-frame `axis`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Subset {
    pub base: Rotation,
    pub axis: Vec3,
}

impl Subset {
    pub fn new(base: Rotation, axis: Vec3) -> Self {
        Subset {
            base,
            axis: axis.normalize(),
        }
    }

    pub fn at(&self, theta: f64) -> Rotation {
        self.base * exp_rot(&(self.axis * theta))
    }

    /// Signed position of `r` along the subset; fails if `r` is off it.
    pub fn coordinate(&self, r: &Rotation) -> Result<f64> {
        let rel = self.base.transpose() * *r;
        match log_rot(&rel) {
            Ok(v) => {
                let theta = self.axis.dot(&v);
                let offset = (v - self.axis * theta).norm();
                if offset > SUBSET_TOL {
                    return Err(Error::MeanNotInSubset { offset });
                }
                Ok(theta)
            }
            Err(Error::AngleNearPi { .. }) => {
                let offset = geodesic_angle(&rel, &exp_rot(&(self.axis * PI)));
                if offset > SUBSET_TOL {
                    return Err(Error::MeanNotInSubset { offset });
                }
                Ok(-PI)
            }
            Err(e) => Err(e),
        }
    }
}

/// Parameters of `exp(kappa cos(theta - theta_bar))` on a subset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsetParams {
    pub theta_bar: f64,
    pub kappa: f64,
}

/// Subset through `m1` that also contains `m2`.
pub fn connecting_subset(m1: &Rotation, m2: &Rotation) -> Result<Subset> {
    let v = log_rot(&(m1.transpose() * *m2))?;
    let n = v.norm();
    if n <= COINCIDENT_TOL {
        return Err(Error::CoincidentAttitudes);
    }
    Ok(Subset::new(*m1, v / n))
}

/// Von Mises parameters of `M(F)` restricted to `subset`. The mean attitude of
/// `F` must lie on the subset.
pub fn mfd_subset_params(f: &Mat3, subset: &Subset) -> Result<SubsetParams> {
    let (m, k) = polar_right(f);
    let theta_bar = subset.coordinate(&m)?;
    let w = subset.axis;
    Ok(SubsetParams {
        theta_bar,
        kappa: k.trace() - w.dot(&(k * w)),
    })
}

/// Wrapped-normal parameters of a concentrated Gaussian restricted to `subset`,
/// reported as a concentration `1 / variance`.
pub fn cgd_subset_params(cgd: &ConcentratedGaussian, subset: &Subset) -> Result<SubsetParams> {
    let theta_bar = subset.coordinate(&cgd.mean)?;
    let info = cgd
        .cov
        .try_inverse()
        .ok_or(Error::NotPositiveDefinite { min_eig: 0.0 })?;
    let dir = match cgd.side {
        Side::Left => subset.axis,
        Side::Right => subset.base * subset.axis,
    };
    Ok(SubsetParams {
        theta_bar,
        kappa: dir.dot(&(info * dir)),
    })
}

/// Posterior of a von Mises prior centred at 0 with concentration `kappa_prior`
/// and a von Mises likelihood centred at `dtheta`. The angle is relative to the prior.
pub fn fuse_mfd_1d(kappa_prior: f64, kappa_meas: f64, dtheta: f64) -> SubsetParams {
    let x = kappa_prior + kappa_meas * dtheta.cos();
    let y = kappa_meas * dtheta.sin();
    SubsetParams {
        theta_bar: y.atan2(x),
        kappa: x.hypot(y),
    }
}

/// Gaussian counterpart of [`fuse_mfd_1d`] with concentrations as inverse variances.
pub fn fuse_cgd_1d(kappa_prior: f64, kappa_meas: f64, dtheta: f64) -> SubsetParams {
    let kappa = kappa_prior + kappa_meas;
    SubsetParams {
        theta_bar: kappa_meas / kappa * dtheta,
        kappa,
    }
}

/// Difference between the MFD and Gaussian posterior angles for a concentration
/// ratio `k = kappa_meas / kappa_prior`.
pub fn delta_theta_plus(k: f64, dtheta: f64) -> f64 {
    fuse_mfd_1d(1.0, k, dtheta).theta_bar - fuse_cgd_1d(1.0, k, dtheta).theta_bar
}

/// `n` angles `pi (2j - n) / n`, `j = 1..=n`, covering `(-pi, pi]`.
pub fn dtheta_grid(n: usize) -> Vec<f64> {
    (1..=n)
        .map(|j| PI * (2.0 * j as f64 - n as f64) / n as f64)
        .collect()
}

/// One posterior state of the two fusion rules in the fixed subset frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FusionStep {
    pub mfd: SubsetParams,
    pub mfd_recursive: SubsetParams,
    pub cgd: SubsetParams,
}

/// Two-step fusion example: a low-confidence prior almost antipodal to a
/// noiseless measurement at the identity, repeated twice.
#[derive(Debug, Clone, PartialEq)]
pub struct Table2 {
    pub axis: Vec3,
    pub steps: Vec<FusionStep>,
}

pub const TABLE2_PRIOR_SCALE: f64 = 55.0;
pub const TABLE2_PRIOR_ANGLE: f64 = 35.0 * PI / 36.0;
pub const TABLE2_MEAS_SCALE: f64 = 60.0;
pub const TABLE2_CGD_PRIOR: f64 = 110.0;
pub const TABLE2_CGD_MEAS: f64 = 120.0;

pub fn table2_axis() -> Vec3 {
    Vec3::new(0.54, 0.54, 0.65).normalize()
}

pub fn table2_scenario() -> Result<Table2> {
    let axis = table2_axis();
    let subset = Subset::new(Rotation::identity(), axis);
    let k_meas = Mat3::identity() * TABLE2_MEAS_SCALE;
    let mut f = exp_rot(&(axis * TABLE2_PRIOR_ANGLE)).into_inner() * TABLE2_PRIOR_SCALE;

    let mut mfd = mfd_subset_params(&f, &subset)?;
    let kappa_meas = mfd_subset_params(&k_meas, &subset)?.kappa;
    let mut rec = mfd;
    let mut cgd = SubsetParams {
        theta_bar: TABLE2_PRIOR_ANGLE,
        kappa: TABLE2_CGD_PRIOR,
    };
    let mut steps = vec![FusionStep {
        mfd,
        mfd_recursive: rec,
        cgd,
    }];
    for _ in 0..2 {
        f += k_meas;
        mfd = mfd_subset_params(&f, &subset)?;
        let r = fuse_mfd_1d(rec.kappa, kappa_meas, wrap_angle(-rec.theta_bar));
        rec = SubsetParams {
            theta_bar: wrap_angle(rec.theta_bar + r.theta_bar),
            kappa: r.kappa,
        };
        let c = fuse_cgd_1d(cgd.kappa, TABLE2_CGD_MEAS, wrap_angle(-cgd.theta_bar));
        cgd = SubsetParams {
            theta_bar: wrap_angle(cgd.theta_bar + c.theta_bar),
            kappa: c.kappa,
        };
        steps.push(FusionStep {
            mfd,
            mfd_recursive: rec,
            cgd,
        });
    }
    Ok(Table2 { axis, steps })
}

/// Fusion outcome for one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub kappa_prior: f64,
    pub kappa_meas: f64,
    pub dtheta: f64,
    pub mfd: SubsetParams,
    pub cgd: SubsetParams,
    pub delta_theta_plus: f64,
}

pub fn sweep(kappa_prior: &[f64], kappa_meas: &[f64], dtheta: &[f64]) -> Vec<SweepRow> {
    let mut rows = Vec::with_capacity(kappa_prior.len() * kappa_meas.len() * dtheta.len());
    for &kp in kappa_prior {
        for &km in kappa_meas {
            for &d in dtheta {
                rows.push(SweepRow {
                    kappa_prior: kp,
                    kappa_meas: km,
                    dtheta: d,
                    mfd: fuse_mfd_1d(kp, km, d),
                    cgd: fuse_cgd_1d(kp, km, d),
                    delta_theta_plus: delta_theta_plus(km / kp, d),
                });
            }
        }
    }
    rows
}
