use rand::Rng;
use rand_distr::StandardNormal;

use crate::so3::{proper_svd, Mat3, Rotation};

const LOW_ACCEPTANCE: f64 = 1e-4;
const WARN_AFTER: u64 = 10_000;

/// Rejection sampler for `M(F)`.
///
/// With `F = U S V^T`, `R = U Q V^T` where the unit quaternion of `Q` follows a
/// Bingham law with exponents `-(0, 2(s2+s3), 2(s1+s3), 2(s1+s2))`. Those are
/// drawn with an angular central Gaussian envelope.
#[derive(Debug, Clone)]
pub struct MfdSampler {
    u: Mat3,
    v_t: Mat3,
    z: [f64; 4],
    omega: [f64; 4],
    log_bound: f64,
    attempts: u64,
    accepted: u64,
    warned: bool,
}

impl MfdSampler {
    pub fn new(f: &Mat3) -> Self {
        let d = proper_svd(f);
        let s = d.s;
        let z = [
            0.0,
            (2.0 * (s[1] + s[2])).max(0.0),
            (2.0 * (s[0] + s[2])).max(0.0),
            (2.0 * (s[0] + s[1])).max(0.0),
        ];
        let b = envelope_parameter(&z);
        let omega = z.map(|zi| 1.0 + 2.0 * zi / b);
        let q = 4.0_f64;
        let log_bound = -0.5 * (q - b) + 0.5 * q * (q / b).ln();
        MfdSampler {
            u: *d.u.matrix(),
            v_t: d.v.matrix().transpose(),
            z,
            omega,
            log_bound,
            attempts: 0,
            accepted: 0,
            warned: false,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Rotation {
        loop {
            self.attempts += 1;
            let mut x = [0.0; 4];
            for (xi, om) in x.iter_mut().zip(&self.omega) {
                let n: f64 = rng.sample(StandardNormal);
                *xi = n / om.sqrt();
            }
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 {
                continue;
            }
            x.iter_mut().for_each(|v| *v /= norm);
            let quad_z: f64 = x.iter().zip(&self.z).map(|(xi, zi)| zi * xi * xi).sum();
            let quad_o: f64 = x.iter().zip(&self.omega).map(|(xi, oi)| oi * xi * xi).sum();
            let log_ratio = -quad_z + 2.0 * quad_o.ln() - self.log_bound;
            let u: f64 = rng.random();
            if u.ln() < log_ratio {
                self.accepted += 1;
                let q = quaternion_matrix(&x);
                return Rotation::from_matrix_unchecked(self.u * q * self.v_t);
            }
            if !self.warned
                && self.attempts > WARN_AFTER
                && self.acceptance_rate() < LOW_ACCEPTANCE
            {
                self.warned = true;
                log::warn!(
                    "matrix Fisher sampler acceptance rate {:.2e}",
                    self.acceptance_rate()
                );
            }
        }
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.attempts == 0 {
            1.0
        } else {
            self.accepted as f64 / self.attempts as f64
        }
    }
}

/// Draws one rotation from `M(F)`.
pub fn sample_mfd<R: Rng + ?Sized>(f: &Mat3, rng: &mut R) -> Rotation {
    MfdSampler::new(f).sample(rng)
}

/// Solves `sum 1 / (b + 2 z_i) = 1` on `(0, 4]`.
fn envelope_parameter(z: &[f64; 4]) -> f64 {
    let g = |b: f64| z.iter().map(|zi| 1.0 / (b + 2.0 * zi)).sum::<f64>() - 1.0;
    if g(4.0) >= 0.0 {
        return 4.0;
    }
    let (mut lo, mut hi) = (0.0_f64, 4.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Rotation matrix of a unit quaternion `(w, x, y, z)`.
fn quaternion_matrix(q: &[f64; 4]) -> Mat3 {
    let [w, x, y, z] = *q;
    Mat3::new(
        1.0 - 2.0 * (y * y + z * z),
        2.0 * (x * y - w * z),
        2.0 * (x * z + w * y),
        2.0 * (x * y + w * z),
        1.0 - 2.0 * (x * x + z * z),
        2.0 * (y * z - w * x),
        2.0 * (x * z - w * y),
        2.0 * (y * z + w * x),
        1.0 - 2.0 * (x * x + y * y),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::so3::Vec3;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn envelope_parameter_solves_equation() {
        for z in [[0.0, 0.0, 0.0, 0.0], [0.0, 1.0, 2.0, 3.0], [0.0, 200.0, 200.0, 200.0]] {
            let b = envelope_parameter(&z);
            assert!(b > 0.0 && b <= 4.0);
            let g: f64 = z.iter().map(|zi| 1.0 / (b + 2.0 * zi)).sum();
            assert!((g - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn bingham_exponents_match_trace_form() {
        // tr(S Q) equals tr(S) minus the quadratic form in z for every unit quaternion.
        let s = Vec3::new(7.0, 3.0, -1.5);
        let z = [0.0, 2.0 * (s[1] + s[2]), 2.0 * (s[0] + s[2]), 2.0 * (s[0] + s[1])];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..50 {
            let mut q = [0.0; 4];
            q.iter_mut().for_each(|v| *v = rng.sample(StandardNormal));
            let n = q.iter().map(|v: &f64| v * v).sum::<f64>().sqrt();
            q.iter_mut().for_each(|v| *v /= n);
            let lhs = (Mat3::from_diagonal(&s) * quaternion_matrix(&q)).trace();
            let rhs = s.sum() - q.iter().zip(&z).map(|(a, b)| b * a * a).sum::<f64>();
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn samples_are_rotations_and_acceptance_is_reasonable() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for f in [Mat3::zeros(), Mat3::identity() * 50.0, Mat3::identity() * 1e6] {
            let mut s = MfdSampler::new(&f);
            for _ in 0..500 {
                let r = s.sample(&mut rng);
                let m = r.matrix();
                assert!((m.transpose() * m - Mat3::identity()).norm() < 1e-12);
                assert!(m.determinant() > 0.0);
            }
            assert!(s.acceptance_rate() > 0.2, "{}", s.acceptance_rate());
        }
    }
}
