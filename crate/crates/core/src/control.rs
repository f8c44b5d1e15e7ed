//! Pure-pursuit tracking laws for each robot class.
//!
//! All four laws share the normalized error gain `|e| / (k_e + |e|)` and the
//! signed deviation angle `zeta` between the heading and the tracking error,
//! measured in the tangent plane, positive when the target is to the left.

use thiserror::Error;

use crate::frames::TransformLW;
use crate::robots::{ActuationRates, RobotClass};
use crate::vecmath::{cross, dot, norm, scale, sub, Vec3};

/// Error magnitude below which `zeta` is taken as zero.
pub const E_EPSILON: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GainError {
    #[error("gain {name} must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gains {
    pub k_theta: f64,
    pub k_theta1: f64,
    pub k_theta2: f64,
    pub k_phi1: f64,
    pub k_phi2: f64,
    pub k_psi: f64,
    pub k_alpha: f64,
    pub k_phi: f64,
    /// Error-normalization length (meters).
    pub k_e: f64,
}

impl Default for Gains {
    fn default() -> Self {
        Gains {
            k_theta: 5.0,
            k_theta1: 5.0,
            k_theta2: 0.5,
            k_phi1: 5.0,
            k_phi2: 0.5,
            k_psi: 4.0,
            k_alpha: 5.0,
            k_phi: 2.0,
            k_e: 1.0,
        }
    }
}

impl Gains {
    pub fn named(&self) -> [(&'static str, f64); 9] {
        [
            ("k_theta", self.k_theta),
            ("k_theta1", self.k_theta1),
            ("k_theta2", self.k_theta2),
            ("k_phi1", self.k_phi1),
            ("k_phi2", self.k_phi2),
            ("k_psi", self.k_psi),
            ("k_alpha", self.k_alpha),
            ("k_phi", self.k_phi),
            ("k_e", self.k_e),
        ]
    }

    pub fn validate(&self) -> Result<(), GainError> {
        for (name, value) in self.named() {
            if !(value.is_finite() && value > 0.0) {
                return Err(GainError::NonPositive { name, value });
            }
        }
        Ok(())
    }

    /// `|e| / (k_e + |e|)`, in `[0, 1)`.
    #[inline]
    pub fn error_gain(&self, e_norm: f64) -> f64 {
        e_norm / (self.k_e + e_norm)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackingSnapshot {
    pub e: Vec3,
    pub zeta: f64,
    pub e_norm: f64,
}

pub fn tracking_error(target: Vec3, p0: Vec3) -> Vec3 {
    sub(target, p0)
}

/// Signed angle from `heading` to the tangent-plane projection of `e`,
/// right-handed about `normal`. Returns 0 when the projection is shorter than
/// `e_epsilon`.
pub fn deviation_angle(e: Vec3, heading: Vec3, normal: Vec3, e_epsilon: f64) -> f64 {
    let e_t = sub(e, scale(normal, dot(e, normal)));
    if norm(e_t) < e_epsilon {
        return 0.0;
    }
    let zeta = dot(cross(heading, e_t), normal).atan2(dot(heading, e_t));
    // keep the half-open range (-pi, pi]
    if zeta == -std::f64::consts::PI {
        std::f64::consts::PI
    } else {
        zeta
    }
}

/// Tracking error and deviation angle for a robot whose local frame is `frame`.
pub fn snapshot(target: Vec3, frame: &TransformLW) -> TrackingSnapshot {
    let e = tracking_error(target, frame.translation());
    let e_norm = norm(e);
    let zeta = if e_norm < E_EPSILON {
        0.0
    } else {
        deviation_angle(e, frame.heading(), frame.normal(), E_EPSILON)
    };
    TrackingSnapshot { e, zeta, e_norm }
}

fn feedforward(desired_velocity: Vec3, radius: f64) -> f64 {
    norm(desired_velocity) / radius
}

fn lateral_rate(snap: &TrackingSnapshot, gains: &Gains) -> f64 {
    let (s, n) = (snap.zeta.sin(), gains.error_gain(snap.e_norm));
    -(gains.k_phi1 * n * s + gains.k_phi2 * s)
}

pub fn control_3r(
    snap: &TrackingSnapshot,
    desired_velocity: Vec3,
    gains: &Gains,
    radius: f64,
) -> ActuationRates {
    let n = gains.error_gain(snap.e_norm);
    ActuationRates {
        theta_dot: gains.k_theta * n * snap.zeta.cos() + feedforward(desired_velocity, radius),
        phi_dot: lateral_rate(snap, gains),
        psi_dot: gains.k_psi * snap.zeta,
        alpha_dot: 0.0,
    }
}

pub fn control_2r(snap: &TrackingSnapshot, gains: &Gains) -> ActuationRates {
    let n = gains.error_gain(snap.e_norm);
    let c = snap.zeta.cos();
    ActuationRates {
        theta_dot: gains.k_theta1 * n * c + gains.k_theta2 * c,
        phi_dot: lateral_rate(snap, gains),
        psi_dot: 0.0,
        alpha_dot: 0.0,
    }
}

pub fn control_rt(
    snap: &TrackingSnapshot,
    desired_velocity: Vec3,
    gains: &Gains,
    radius: f64,
) -> ActuationRates {
    let n = gains.error_gain(snap.e_norm);
    ActuationRates {
        theta_dot: gains.k_theta * n * snap.zeta.cos() + feedforward(desired_velocity, radius),
        phi_dot: 0.0,
        psi_dot: gains.k_psi * snap.zeta,
        alpha_dot: 0.0,
    }
}

/// RS law. Heading is driven, so `psi_dot` is left at zero here.
pub fn control_rs(
    snap: &TrackingSnapshot,
    desired_velocity: Vec3,
    gains: &Gains,
    radius: f64,
) -> ActuationRates {
    let n = gains.error_gain(snap.e_norm);
    ActuationRates {
        theta_dot: 0.0,
        phi_dot: gains.k_phi * snap.zeta,
        psi_dot: 0.0,
        alpha_dot: gains.k_alpha * n * snap.zeta.cos() + feedforward(desired_velocity, radius),
    }
}

pub fn control(
    class: RobotClass,
    snap: &TrackingSnapshot,
    desired_velocity: Vec3,
    gains: &Gains,
    radius: f64,
) -> ActuationRates {
    match class {
        RobotClass::ThreeR => control_3r(snap, desired_velocity, gains, radius),
        RobotClass::TwoR => control_2r(snap, gains),
        RobotClass::RT => control_rt(snap, desired_velocity, gains, radius),
        RobotClass::RS => control_rs(snap, desired_velocity, gains, radius),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    const UP: Vec3 = [0.0, 0.0, 1.0];
    const X: Vec3 = [1.0, 0.0, 0.0];

    fn snap(e_norm: f64, zeta: f64) -> TrackingSnapshot {
        TrackingSnapshot {
            e: [e_norm, 0.0, 0.0],
            zeta,
            e_norm,
        }
    }

    #[test]
    fn tracking_error_examples() {
        assert_eq!(tracking_error([1.0, 0.0, 0.0], [0.0; 3]), [1.0, 0.0, 0.0]);
        assert_eq!(tracking_error([0.3, 0.2, 0.1], [0.3, 0.2, 0.1]), [0.0; 3]);
        assert_eq!(
            tracking_error([2.0, -1.0, 0.5], [1.0, 1.0, 0.5]),
            [1.0, -2.0, 0.0]
        );
    }

    #[test]
    fn deviation_angle_examples() {
        assert_eq!(deviation_angle([1.0, 0.0, 0.0], X, UP, E_EPSILON), 0.0);
        assert_abs_diff_eq!(
            deviation_angle([0.0, 1.0, 0.0], X, UP, E_EPSILON),
            FRAC_PI_2
        );
        assert_eq!(deviation_angle([-1.0, 0.0, 0.0], X, UP, E_EPSILON), PI);
        assert_eq!(deviation_angle([0.0, 0.0, 0.3], X, UP, E_EPSILON), 0.0);
        assert_abs_diff_eq!(
            deviation_angle([0.0, -2.0, 0.0], X, UP, E_EPSILON),
            -FRAC_PI_2
        );
    }

    #[test]
    fn control_3r_examples() {
        let g = Gains::default();
        let r = control_3r(&snap(0.0, 0.0), [0.1, 0.0, 0.0], &g, 0.2);
        assert_abs_diff_eq!(r.theta_dot, 0.5, epsilon = 1e-15);
        assert_eq!(r.phi_dot.abs(), 0.0);
        assert_eq!(r.psi_dot, 0.0);

        let far = control_3r(&snap(1e12, 0.0), [0.0; 3], &g, 0.2);
        assert_abs_diff_eq!(far.theta_dot, g.k_theta, epsilon = 1e-9);

        let e = 0.8;
        let side = control_3r(&snap(e, FRAC_PI_2), [0.0; 3], &g, 0.2);
        let n = e / (g.k_e + e);
        assert_abs_diff_eq!(side.theta_dot, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(side.phi_dot, -(g.k_phi1 * n + g.k_phi2), epsilon = 1e-15);
        assert_abs_diff_eq!(side.psi_dot, g.k_psi * FRAC_PI_2, epsilon = 1e-15);
    }

    #[test]
    fn control_2r_examples() {
        let g = Gains::default();
        let e = 0.6;
        let n = e / (g.k_e + e);
        let ahead = control_2r(&snap(e, 0.0), &g);
        assert_abs_diff_eq!(
            ahead.theta_dot,
            g.k_theta1 * n + g.k_theta2,
            epsilon = 1e-15
        );
        assert_eq!(ahead.phi_dot.abs(), 0.0);
        assert_eq!(ahead.psi_dot, 0.0);

        let behind = control_2r(&snap(e, PI), &g);
        assert!(behind.theta_dot < 0.0);
        assert_abs_diff_eq!(behind.phi_dot, 0.0, epsilon = 1e-15);

        // literal law keeps a residual roll at zero error
        let rest = control_2r(&snap(0.0, 0.0), &g);
        assert_eq!(rest.theta_dot, g.k_theta2);
    }

    #[test]
    fn control_rt_examples() {
        let g = Gains::default();
        let r = control_rt(&snap(0.0, 0.0), [0.0, 0.1, 0.0], &g, 0.2);
        assert_abs_diff_eq!(r.theta_dot, 0.5, epsilon = 1e-15);
        assert_eq!(r.psi_dot, 0.0);

        let g2 = Gains { k_psi: 2.0, ..g };
        let r = control_rt(&snap(0.5, 0.2), [0.0; 3], &g2, 0.2);
        assert_abs_diff_eq!(r.psi_dot, 0.4, epsilon = 1e-15);
        assert_eq!(r.phi_dot, 0.0);

        let r = control_rt(&snap(0.0, 0.0), [0.0; 3], &g, 0.2);
        assert_eq!(r, ActuationRates::default());
    }

    #[test]
    fn control_rs_examples() {
        let g = Gains::default();
        let r = control_rs(&snap(0.0, 0.0), [0.0, 0.0, 0.1], &g, 0.2);
        assert_abs_diff_eq!(r.alpha_dot, 0.5, epsilon = 1e-15);
        assert_eq!(r.phi_dot, 0.0);

        let g2 = Gains { k_phi: 1.5, ..g };
        let r = control_rs(&snap(0.4, 0.3), [0.0; 3], &g2, 0.2);
        assert_abs_diff_eq!(r.phi_dot, 0.45, epsilon = 1e-15);
        assert_eq!(r.theta_dot, 0.0);
        assert_eq!(r.psi_dot, 0.0);

        let r = control_rs(&snap(0.0, 0.0), [0.0; 3], &g, 0.2);
        assert_eq!(r, ActuationRates::default());
    }

    #[test]
    fn snapshot_uses_frame_axes() {
        let frame = TransformLW::IDENTITY;
        let s = snapshot([0.0, 2.0, 0.0], &frame);
        assert_eq!(s.e_norm, 2.0);
        assert_abs_diff_eq!(s.zeta, FRAC_PI_2);
        let at = snapshot([0.0; 3], &frame);
        assert_eq!(at.zeta, 0.0);
    }

    #[test]
    fn invalid_gains_rejected() {
        let g = Gains {
            k_e: 0.0,
            ..Default::default()
        };
        assert_eq!(
            g.validate(),
            Err(GainError::NonPositive {
                name: "k_e",
                value: 0.0
            })
        );
        assert!(Gains::default().validate().is_ok());
    }
}
