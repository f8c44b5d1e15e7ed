use std::f64::consts::PI;

use proptest::prelude::*;

use spherekin::control::{self, deviation_angle, snapshot, Gains};
use spherekin::frames::{
    rotation_quaternion, rotation_rodrigues, tilt_quaternion, transform_lw, SurfaceSample,
};
use spherekin::robots::{body_velocity, world_velocity, ActuationRates, RobotClass, RobotState};
use spherekin::terrain::{make_sinusoidal, SinusoidalParams, Surface, Terrain};
use spherekin::vecmath::{
    cross, det, dot, mat_mul, mat_vec, max_abs_diff, norm, transpose, Mat3, IDENTITY3,
};

fn slopes() -> impl Strategy<Value = (f64, f64)> {
    (-5.0..5.0f64, -5.0..5.0f64)
}

fn class() -> impl Strategy<Value = RobotClass> {
    prop::sample::select(RobotClass::ALL.to_vec())
}

fn surface() -> impl Strategy<Value = Surface> {
    (0.0..0.5f64, 0.5..3.0f64)
        .prop_map(|(a, omega)| make_sinusoidal(SinusoidalParams { a, omega }).unwrap())
}

fn rates_for(class: RobotClass, r: [f64; 4]) -> ActuationRates {
    let [theta_dot, phi_dot, psi_dot, alpha_dot] = r;
    match class {
        RobotClass::ThreeR => ActuationRates {
            theta_dot,
            phi_dot,
            psi_dot,
            alpha_dot: 0.0,
        },
        RobotClass::TwoR => ActuationRates {
            theta_dot,
            phi_dot,
            ..Default::default()
        },
        RobotClass::RT => ActuationRates {
            theta_dot,
            psi_dot,
            ..Default::default()
        },
        RobotClass::RS => ActuationRates {
            phi_dot,
            alpha_dot,
            ..Default::default()
        },
    }
}

/// Rotation by `gamma` about unit `axis`, built from scratch.
fn axis_angle(axis: [f64; 3], gamma: f64) -> Mat3 {
    let (s, c) = gamma.sin_cos();
    let [x, y, z] = axis;
    let k = [[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]];
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let id = if i == j { 1.0 } else { 0.0 };
            m[i][j] = id * c + s * k[i][j] + (1.0 - c) * axis[i] * axis[j];
        }
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn tilt_matches_axis_angle_oracle((fx, fy) in slopes()) {
        prop_assume!(fx.hypot(fy) > 1e-6);
        let n = {
            let l = (1.0 + fx * fx + fy * fy).sqrt();
            [-fx / l, -fy / l, 1.0 / l]
        };
        let ax = cross([0.0, 0.0, 1.0], n);
        let axis = [ax[0] / norm(ax), ax[1] / norm(ax), 0.0];
        let oracle = axis_angle(axis, n[2].acos());
        let s = SurfaceSample::from_slopes(fx, fy);
        prop_assert!(max_abs_diff(&rotation_rodrigues(&s), &oracle) < 1e-12);
        prop_assert!(max_diff(mat_vec(&oracle, [0.0, 0.0, 1.0]), n) < 1e-14);
    }

    #[test]
    fn rodrigues_equals_quaternion((fx, fy) in slopes()) {
        let s = SurfaceSample::from_slopes(fx, fy);
        prop_assert!(max_abs_diff(&rotation_rodrigues(&s), &rotation_quaternion(&s)) < 1e-12);
        prop_assert!((tilt_quaternion(&s).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn transform_is_proper_rotation((fx, fy) in slopes(), psi in -PI..PI, x in -3.0..3.0f64, y in -3.0..3.0f64) {
        let s = SurfaceSample::from_slopes(fx, fy);
        let t = transform_lw([x, y, 0.3], &s, psi);
        let r = t.rotation();
        prop_assert!(max_abs_diff(&mat_mul(&transpose(&r), &r), &IDENTITY3) < 1e-12);
        prop_assert!((det(&r) - 1.0).abs() < 1e-12);
        prop_assert!(max_diff(t.normal(), s.n_hat) < 1e-15);
        prop_assert!(max_diff(t.translation(), [x, y, 0.3]) == 0.0);
        for c in 0..2 {
            let col = t.column(c);
            prop_assert!((col[2] - (fx * col[0] + fy * col[1])).abs() < 1e-12);
            prop_assert!(dot(col, s.n_hat).abs() < 1e-12);
        }
        prop_assert!(t.at(3, 0) == 0.0 && t.at(3, 1) == 0.0 && t.at(3, 2) == 0.0 && t.at(3, 3) == 1.0);
    }

    #[test]
    fn rotation_is_continuous_at_flat(dir in -PI..PI, k in 0usize..3) {
        let r = [1e-3, 1e-6, 1e-9][k];
        let s = SurfaceSample::from_slopes(r * dir.cos(), r * dir.sin());
        let rot = rotation_rodrigues(&s);
        prop_assert!(max_abs_diff(&rot, &IDENTITY3) <= 1.01 * r);
        prop_assert!(max_abs_diff(&rot, &rotation_quaternion(&s)) < 1e-14);
    }

    #[test]
    fn world_velocity_is_tangent_and_speed_preserving(
        c in class(), surf in surface(), x in -3.0..3.0f64, y in -3.0..3.0f64,
        psi in -PI..PI, phi in -0.7..0.7f64, raw in prop::array::uniform4(-5.0..5.0f64),
        radius in 0.05..1.0f64,
    ) {
        let st = RobotState { p0: [x, y, surf.height(x, y)], psi, phi, ..Default::default() };
        let rates = rates_for(c, raw);
        let v = world_velocity(c, &st, &rates, &surf, radius).unwrap();
        let b = body_velocity(c, &st, &rates, radius).unwrap();
        let (fx, fy) = surf.gradient(x, y);
        prop_assert!((v[2] - (fx * v[0] + fy * v[1])).abs() < 1e-12);
        prop_assert!((norm(v) - norm(b)).abs() < 1e-12);
    }

    #[test]
    fn rs_scales_rt_by_cos_phi(
        surf in surface(), x in -3.0..3.0f64, y in -3.0..3.0f64, psi in -PI..PI,
        phi in -0.7..0.7f64, alpha_dot in -5.0..5.0f64,
    ) {
        let st = RobotState { p0: [x, y, surf.height(x, y)], psi, phi, ..Default::default() };
        let rs = ActuationRates { alpha_dot, ..Default::default() };
        let rt = ActuationRates { theta_dot: alpha_dot, ..Default::default() };
        let a = world_velocity(RobotClass::RS, &st, &rs, &surf, 0.2).unwrap();
        let b = world_velocity(RobotClass::RT, &st, &rt, &surf, 0.2).unwrap();
        for k in 0..3 {
            prop_assert!((a[k] - phi.cos() * b[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn forbidden_rates_are_rejected(c in class(), v in 0.1..5.0f64) {
        let forbidden: &[fn(f64) -> ActuationRates] = match c {
            RobotClass::ThreeR => &[|v| ActuationRates { alpha_dot: v, ..Default::default() }],
            RobotClass::TwoR => &[
                |v| ActuationRates { psi_dot: v, ..Default::default() },
                |v| ActuationRates { alpha_dot: v, ..Default::default() },
            ],
            RobotClass::RT => &[
                |v| ActuationRates { phi_dot: v, ..Default::default() },
                |v| ActuationRates { alpha_dot: v, ..Default::default() },
            ],
            RobotClass::RS => &[|v| ActuationRates { theta_dot: v, ..Default::default() }],
        };
        for make in forbidden {
            prop_assert!(make(v).validate_for(c).is_err());
        }
    }

    #[test]
    fn error_gain_is_monotone(a in 0.0..100.0f64, d in 1e-6..10.0f64) {
        let g = Gains::default();
        let (lo, hi) = (g.error_gain(a), g.error_gain(a + d));
        prop_assert!((0.0..1.0).contains(&lo) && lo < hi && hi < 1.0);
    }

    #[test]
    fn deviation_angle_sign_and_range(psi in -PI..PI, bearing in -3.1..3.1f64, dist in 0.01..5.0f64) {
        let flat = SurfaceSample::from_slopes(0.0, 0.0);
        let t = transform_lw([0.0, 0.0, 0.0], &flat, psi);
        let h = t.heading();
        let left = cross([0.0, 0.0, 1.0], h);
        let dir = [
            bearing.cos() * h[0] + bearing.sin() * left[0],
            bearing.cos() * h[1] + bearing.sin() * left[1],
            0.0,
        ];
        let target = [dist * dir[0], dist * dir[1], 0.0];
        let snap = snapshot(target, &t);
        prop_assert!((snap.zeta - bearing).abs() < 1e-9);
        let z = deviation_angle(target, h, t.normal(), 1e-9);
        prop_assert!(z > -PI && z <= PI);
    }

    #[test]
    fn controllers_agree_across_classes(
        surf_slopes in slopes(), psi in -PI..PI, tx in -2.0..2.0f64, ty in -2.0..2.0f64,
        vd in prop::array::uniform3(-1.0..1.0f64),
    ) {
        let s = SurfaceSample::from_slopes(surf_slopes.0, surf_slopes.1);
        let t = transform_lw([0.0, 0.0, 0.0], &s, psi);
        let snap = snapshot([tx, ty, 0.1], &t);
        let g = Gains::default();
        let r3 = control::control(RobotClass::ThreeR, &snap, vd, &g, 0.2);
        let rt = control::control(RobotClass::RT, &snap, vd, &g, 0.2);
        let r2 = control::control(RobotClass::TwoR, &snap, vd, &g, 0.2);
        let rs = control::control(RobotClass::RS, &snap, vd, &g, 0.2);
        prop_assert_eq!(r3.theta_dot, rt.theta_dot);
        prop_assert_eq!(r3.psi_dot, rt.psi_dot);
        prop_assert_eq!(r3.phi_dot, r2.phi_dot);
        prop_assert_eq!(rs.alpha_dot, r3.theta_dot);
        for (c, r) in [(RobotClass::ThreeR, r3), (RobotClass::TwoR, r2), (RobotClass::RT, rt), (RobotClass::RS, rs)] {
            prop_assert!(r.validate_for(c).is_ok());
        }
        if snap.zeta > 1e-9 && snap.zeta < PI {
            prop_assert!(r3.phi_dot < 0.0 && r3.psi_dot > 0.0 && rs.phi_dot > 0.0);
        }
    }
}

fn max_diff(a: [f64; 3], b: [f64; 3]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
