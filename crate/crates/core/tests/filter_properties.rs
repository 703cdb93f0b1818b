mod common;

use common::{gaussian_vec, random_rotation};
use mfd_attitude::filters::{
    fnf_l_predict, fnf_r_predict, fnf_update, vector_measurement, wahba_svd, AttitudeMeasurement, GyroSample, Iekf,
    VectorObservation,
};
use mfd_attitude::mfd::{mfd_to_covariance, InvariantBelief, Side};
use mfd_attitude::so3::{exp_rot, geodesic_angle, hat, log_rot, Mat3, Rotation, Vec3};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn spd(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Mat3 {
    let q = random_rotation(rng);
    let d = Vec3::new(rng.random_range(lo..hi), rng.random_range(lo..hi), rng.random_range(lo..hi));
    q.matrix() * Mat3::from_diagonal(&d) * q.matrix().transpose()
}

fn cost(obs: &[VectorObservation], r: &Rotation) -> f64 {
    obs.iter()
        .map(|o| 0.5 * o.weight * (o.measured - r.transpose() * o.reference).norm_squared())
        .sum()
}

#[test]
fn wahba_beats_random_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let truth = random_rotation(&mut rng);
    let obs: Vec<VectorObservation> = (0..3)
        .map(|_| {
            let e = gaussian_vec(&mut rng, 1.0).normalize();
            let b = truth.transpose() * e + gaussian_vec(&mut rng, 0.2);
            VectorObservation::new(e, b, Mat3::identity() * 0.04)
        })
        .collect();
    let best = cost(&obs, &wahba_svd(&obs).unwrap().rotation);
    for _ in 0..10_000 {
        assert!(best <= cost(&obs, &random_rotation(&mut rng)));
    }
}

#[test]
fn single_vector_is_not_unique() {
    let obs = [VectorObservation::new(Vec3::x(), Vec3::y(), Mat3::identity() * 0.01)];
    assert!(wahba_svd(&obs).is_err());
}

#[test]
fn left_linear_map_is_second_order_accurate() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let r = random_rotation(&mut rng);
    let base: Vec<VectorObservation> = [
        Vec3::new(1.0, 0.3, 0.0),
        Vec3::new(0.0, 1.0, -0.4),
        Vec3::new(0.5, 0.2, 1.0),
    ]
    .iter()
    .zip([1.0, 0.7, 2.0])
    .map(|(e, w)| {
        let e = e.normalize();
        VectorObservation::new(e, r.transpose() * e, Mat3::identity()).with_weight(w)
    })
    .collect();
    let l = base
        .iter()
        .fold(Mat3::zeros(), |acc, o| acc + o.reference * o.measured.transpose() * o.weight);
    // body-frame normal matrix: tr(R^T L) I - R^T L
    let rl = r.matrix().transpose() * l;
    let b_inv = (Mat3::identity() * rl.trace() - rl).try_inverse().unwrap();
    let dir: Vec<Vec3> = (0..3).map(|_| gaussian_vec(&mut rng, 1.0)).collect();
    let residual = |eps: f64| {
        let pert: Vec<VectorObservation> = base
            .iter()
            .zip(&dir)
            .map(|(o, d)| VectorObservation {
                measured: o.measured + d * eps,
                ..*o
            })
            .collect();
        let est = wahba_svd(&pert).unwrap().rotation;
        let xi = log_rot(&(est.transpose() * r)).unwrap();
        let lin = base.iter().zip(&dir).fold(Vec3::zeros(), |acc, (o, d)| {
            acc + b_inv * hat(&(r.transpose() * o.reference)) * d * (o.weight * eps)
        });
        (xi - lin).norm()
    };
    let r1 = residual(1e-2);
    let r2 = residual(5e-3);
    let r3 = residual(2.5e-3);
    let order = (r1 / r2).log2().min((r2 / r3).log2());
    assert!(order >= 1.9, "order {order}: {r1:e} {r2:e} {r3:e}");
}

#[test]
fn prediction_adds_process_noise_in_the_right_frame() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let central = random_rotation(&mut rng);
        let p = spd(&mut rng, 1e-3, 0.2);
        let q = spd(&mut rng, 1e-5, 1e-2);
        let gyro = GyroSample {
            omega: gaussian_vec(&mut rng, 2.0),
            dt: 0.02,
            q,
        };
        let r = *central.matrix();
        let right = InvariantBelief::from_covariance(Side::Right, central, &p).unwrap();
        let out = fnf_r_predict(&right, &gyro).unwrap();
        let expect = p + r * q * r.transpose();
        assert!((mfd_to_covariance(&out.n).unwrap() - expect).norm() < 1e-9 * expect.norm());

        let left = InvariantBelief::from_covariance(Side::Left, central, &p).unwrap();
        let out = fnf_l_predict(&left, &gyro).unwrap();
        let e = *exp_rot(&gyro.increment()).matrix();
        let expect = e.transpose() * p * e + q;
        assert!((mfd_to_covariance(&out.n).unwrap() - expect).norm() < 1e-9 * expect.norm());
        assert!(geodesic_angle(&out.central, &(central * exp_rot(&gyro.increment()))) < 1e-12);
    }
}

#[test]
fn zero_process_noise_keeps_concentration() {
    let b = InvariantBelief::new(
        Side::Right,
        Rotation::identity(),
        Mat3::from_diagonal(&Vec3::new(30.0, 20.0, 10.0)),
    );
    let gyro = GyroSample {
        omega: Vec3::new(0.0, 0.0, 1.0),
        dt: 0.1,
        q: Mat3::zeros(),
    };
    let out = fnf_r_predict(&b, &gyro).unwrap();
    assert!((out.n - b.n).norm() < 1e-9);
    assert!(geodesic_angle(&out.central, &exp_rot(&Vec3::new(0.0, 0.0, 0.1))) < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// Both conventions multiply the same MFD densities, so their posteriors coincide.
    #[test]
    fn left_and_right_updates_agree(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f_prior = random_rotation(&mut rng).into_inner() * spd(&mut rng, 1.0, 50.0);
        let rm = random_rotation(&mut rng);
        let n_body = spd(&mut rng, 1.0, 50.0);
        let right = fnf_update(
            &InvariantBelief::from_mfd(Side::Right, &f_prior),
            &AttitudeMeasurement::from_body_noise(rm, &n_body, Side::Right),
        ).unwrap();
        let left = fnf_update(
            &InvariantBelief::from_mfd(Side::Left, &f_prior),
            &AttitudeMeasurement::from_body_noise(rm, &n_body, Side::Left),
        ).unwrap();
        let (fr, fl) = (right.to_mfd().f, left.to_mfd().f);
        prop_assert!((fr - fl).norm() < 1e-9 * fr.norm());
        prop_assert!(geodesic_angle(&right.central, &left.central) < 1e-9);
    }
}

#[test]
fn vector_measurement_covariance_tracks_noise_level() {
    let r = exp_rot(&Vec3::new(0.2, 0.1, -0.5));
    let refs = [Vec3::x(), Vec3::y(), Vec3::z()];
    let mut prev = 0.0;
    for g in [1e-6, 1e-4, 1e-2] {
        let obs: Vec<VectorObservation> = refs
            .iter()
            .map(|e| VectorObservation::new(*e, r.transpose() * *e, Mat3::from_diagonal(&Vec3::new(0.3, 0.01, 0.01)) * g))
            .collect();
        let (sol, p, meas) = vector_measurement(&obs, Side::Right).unwrap();
        assert!(geodesic_angle(&sol.rotation, &r) < 1e-12);
        assert!(p.trace() > prev);
        assert!(meas.n.trace() > 0.0);
        prev = p.trace();
    }
}

#[test]
fn iekf_attitude_update_pulls_towards_the_measurement() {
    let truth = exp_rot(&Vec3::new(0.1, -0.2, 0.3));
    let mut f = Iekf::new(Rotation::identity(), Mat3::identity() * 1.0);
    f.update_attitude(&truth, &(Mat3::identity() * 1e-6)).unwrap();
    assert!(geodesic_angle(&f.rotation, &truth) < 1e-5);
    assert!(f.cov.trace() < 1e-5);
}
