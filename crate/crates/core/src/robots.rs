//! Rolling kinematics of the four spherical-robot classes.
//!
//! | class | actuated rates | heading |
//! |-------|----------------|---------|
//! | 3R    | theta, phi, psi | commanded |
//! | 2R    | theta, phi      | fixed at 0 |
//! | RT    | theta, psi      | commanded |
//! | RS    | alpha, phi      | driven by tilt |

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::frames::{sample_surface, transform_lw, velocity_to_world, SurfaceSample};
use crate::terrain::Terrain;
use crate::vecmath::{add, scale, Vec3};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RobotError {
    #[error("{class} robots cannot actuate {rate} (got {value})")]
    ForbiddenRate {
        class: RobotClass,
        rate: &'static str,
        value: f64,
    },
    #[error("actuation rate {rate} is not finite")]
    NonFiniteRate { rate: &'static str },
    #[error("sphere radius must be positive and finite, got {0}")]
    Radius(f64),
    #[error("unknown robot class {0:?} (expected 3R, 2R, RT or RS)")]
    UnknownClass(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RobotClass {
    ThreeR,
    TwoR,
    RT,
    RS,
}

impl RobotClass {
    pub const ALL: [RobotClass; 4] = [
        RobotClass::ThreeR,
        RobotClass::TwoR,
        RobotClass::RT,
        RobotClass::RS,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            RobotClass::ThreeR => "3R",
            RobotClass::TwoR => "2R",
            RobotClass::RT => "RT",
            RobotClass::RS => "RS",
        }
    }
}

impl fmt::Display for RobotClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RobotClass {
    type Err = RobotError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "3R" => Ok(RobotClass::ThreeR),
            "2R" => Ok(RobotClass::TwoR),
            "RT" => Ok(RobotClass::RT),
            "RS" => Ok(RobotClass::RS),
            _ => Err(RobotError::UnknownClass(s.to_string())),
        }
    }
}

/// Contact point plus the orientation angles. `theta`, `phi` and `alpha` are
/// unbounded accumulators; `psi` is never wrapped before use.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RobotState {
    pub p0: Vec3,
    pub theta: f64,
    pub phi: f64,
    pub psi: f64,
    pub alpha: f64,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ActuationRates {
    pub theta_dot: f64,
    pub phi_dot: f64,
    pub psi_dot: f64,
    pub alpha_dot: f64,
}

impl ActuationRates {
    pub fn validate_for(&self, class: RobotClass) -> Result<(), RobotError> {
        let named = [
            ("theta_dot", self.theta_dot),
            ("phi_dot", self.phi_dot),
            ("psi_dot", self.psi_dot),
            ("alpha_dot", self.alpha_dot),
        ];
        if let Some((rate, _)) = named.iter().find(|(_, v)| !v.is_finite()) {
            return Err(RobotError::NonFiniteRate { rate });
        }
        let forbidden: &[(&'static str, f64)] = match class {
            RobotClass::ThreeR => &[("alpha_dot", self.alpha_dot)],
            RobotClass::TwoR => &[("psi_dot", self.psi_dot), ("alpha_dot", self.alpha_dot)],
            RobotClass::RT => &[("phi_dot", self.phi_dot), ("alpha_dot", self.alpha_dot)],
            // psi is driven for RS; any psi_dot supplied is ignored.
            RobotClass::RS => &[("theta_dot", self.theta_dot)],
        };
        match forbidden.iter().find(|(_, v)| *v != 0.0) {
            Some(&(rate, value)) => Err(RobotError::ForbiddenRate { class, rate, value }),
            None => Ok(()),
        }
    }
}

fn check_radius(radius: f64) -> Result<(), RobotError> {
    if radius.is_finite() && radius > 0.0 {
        Ok(())
    } else {
        Err(RobotError::Radius(radius))
    }
}

/// Velocity of the contact point in the local (tangent-plane) frame.
pub fn body_velocity(
    class: RobotClass,
    state: &RobotState,
    rates: &ActuationRates,
    radius: f64,
) -> Result<Vec3, RobotError> {
    rates.validate_for(class)?;
    check_radius(radius)?;
    Ok(match class {
        RobotClass::ThreeR | RobotClass::TwoR => {
            [radius * rates.theta_dot, -radius * rates.phi_dot, 0.0]
        }
        RobotClass::RT => [radius * rates.theta_dot, 0.0, 0.0],
        RobotClass::RS => [
            radius * rates.alpha_dot * state.phi.cos(),
            -radius * rates.phi_dot,
            0.0,
        ],
    })
}

/// Heading angle actually used in the transform; 2R robots cannot turn.
#[inline]
pub fn effective_psi(class: RobotClass, state: &RobotState) -> f64 {
    match class {
        RobotClass::TwoR => 0.0,
        _ => state.psi,
    }
}

pub fn world_velocity<T: Terrain + ?Sized>(
    class: RobotClass,
    state: &RobotState,
    rates: &ActuationRates,
    surface: &T,
    radius: f64,
) -> Result<Vec3, RobotError> {
    let v_local = body_velocity(class, state, rates, radius)?;
    let sample = sample_surface(surface, state.p0[0], state.p0[1]);
    let t = transform_lw(state.p0, &sample, effective_psi(class, state));
    Ok(velocity_to_world(&t, v_local).expect("body velocity has no normal component"))
}

/// Time derivative of the state's `psi`.
///
/// Commanded turning rates (3R, RT) are about `+n_hat`, the sense in which the
/// deviation angle is measured, while `psi` turns the local frame about
/// `-n_hat`; hence the sign change. RS heading follows the normal component of
/// the body angular velocity, `-alpha_dot sin(phi)`.
pub fn heading_rate(class: RobotClass, state: &RobotState, rates: &ActuationRates) -> f64 {
    match class {
        RobotClass::ThreeR | RobotClass::RT => -rates.psi_dot,
        RobotClass::TwoR => 0.0,
        RobotClass::RS => -rates.alpha_dot * state.phi.sin(),
    }
}

/// Sphere center `P0 + R n_hat`.
pub fn center_point(state: &RobotState, sample: &SurfaceSample, radius: f64) -> Vec3 {
    let direct = add(state.p0, scale(sample.n_hat, radius));
    debug_assert!({
        let via = center_point_via_transform(state, sample, radius);
        direct.iter().zip(via).all(|(a, b)| (a - b).abs() <= 1e-12)
    });
    direct
}

/// Sphere center as the image of the local point `[0, 0, R]`.
pub fn center_point_via_transform(state: &RobotState, sample: &SurfaceSample, radius: f64) -> Vec3 {
    transform_lw(state.p0, sample, state.psi).transform_point([0.0, 0.0, radius])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terrain::make_plane;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_3, FRAC_PI_6};

    fn close(a: Vec3, b: Vec3, tol: f64) {
        for i in 0..3 {
            assert_abs_diff_eq!(a[i], b[i], epsilon = tol);
        }
    }

    #[test]
    fn body_velocity_examples() {
        let st = RobotState::default();
        let r = ActuationRates {
            theta_dot: 1.0,
            phi_dot: 0.5,
            psi_dot: 0.0,
            alpha_dot: 0.0,
        };
        close(
            body_velocity(RobotClass::ThreeR, &st, &r, 0.2).unwrap(),
            [0.2, -0.1, 0.0],
            1e-15,
        );

        let r = ActuationRates {
            theta_dot: 2.0,
            ..Default::default()
        };
        close(
            body_velocity(RobotClass::RT, &st, &r, 0.2).unwrap(),
            [0.4, 0.0, 0.0],
            1e-15,
        );

        let st_rs = RobotState {
            phi: FRAC_PI_3,
            ..Default::default()
        };
        let r = ActuationRates {
            alpha_dot: 1.0,
            ..Default::default()
        };
        close(
            body_velocity(RobotClass::RS, &st_rs, &r, 0.2).unwrap(),
            [0.1, 0.0, 0.0],
            1e-15,
        );

        for class in RobotClass::ALL {
            let v = body_velocity(class, &st, &ActuationRates::default(), 0.2).unwrap();
            assert_eq!(v.map(f64::abs), [0.0; 3]);
        }
    }

    #[test]
    fn forbidden_rates_rejected() {
        let st = RobotState::default();
        let psi = ActuationRates {
            psi_dot: 1.0,
            ..Default::default()
        };
        assert!(matches!(
            body_velocity(RobotClass::TwoR, &st, &psi, 0.2),
            Err(RobotError::ForbiddenRate {
                rate: "psi_dot",
                ..
            })
        ));
        let phi = ActuationRates {
            phi_dot: 1.0,
            ..Default::default()
        };
        assert!(body_velocity(RobotClass::RT, &st, &phi, 0.2).is_err());
        let theta = ActuationRates {
            theta_dot: 1.0,
            ..Default::default()
        };
        assert!(body_velocity(RobotClass::RS, &st, &theta, 0.2).is_err());
        let alpha = ActuationRates {
            alpha_dot: 1.0,
            ..Default::default()
        };
        assert!(body_velocity(RobotClass::ThreeR, &st, &alpha, 0.2).is_err());
        // RS ignores psi_dot
        assert!(body_velocity(RobotClass::RS, &st, &psi, 0.2).is_ok());
        assert!(body_velocity(RobotClass::ThreeR, &st, &theta, 0.0).is_err());
        let nan = ActuationRates {
            theta_dot: f64::NAN,
            ..Default::default()
        };
        assert!(body_velocity(RobotClass::ThreeR, &st, &nan, 0.2).is_err());
    }

    #[test]
    fn world_velocity_examples() {
        let flat = make_plane(0.0, 0.0).unwrap();
        let st = RobotState::default();
        let roll = ActuationRates {
            theta_dot: 1.0,
            ..Default::default()
        };
        close(
            world_velocity(RobotClass::ThreeR, &st, &roll, &flat, 0.2).unwrap(),
            [0.2, 0.0, 0.0],
            1e-15,
        );

        let incline = make_plane(1.0, 0.0).unwrap();
        let v = world_velocity(RobotClass::ThreeR, &st, &roll, &incline, 0.2).unwrap();
        close(v, [0.2 * FRAC_1_SQRT_2, 0.0, 0.2 * FRAC_1_SQRT_2], 1e-15);

        let st_rs = RobotState {
            psi: FRAC_PI_2,
            ..Default::default()
        };
        let r = ActuationRates {
            alpha_dot: 1.0,
            ..Default::default()
        };
        close(
            world_velocity(RobotClass::RS, &st_rs, &r, &flat, 0.2).unwrap(),
            [0.0, -0.2, 0.0],
            1e-15,
        );
    }

    #[test]
    fn two_r_ignores_stored_heading() {
        let flat = make_plane(0.0, 0.0).unwrap();
        let st = RobotState {
            psi: 1.0,
            ..Default::default()
        };
        let roll = ActuationRates {
            theta_dot: 1.0,
            ..Default::default()
        };
        let v = world_velocity(RobotClass::TwoR, &st, &roll, &flat, 0.2).unwrap();
        close(v, [0.2, 0.0, 0.0], 1e-15);
    }

    #[test]
    fn heading_rate_examples() {
        let any = ActuationRates {
            theta_dot: 3.0,
            phi_dot: -1.0,
            ..Default::default()
        };
        assert_eq!(
            heading_rate(RobotClass::TwoR, &RobotState::default(), &any),
            0.0
        );

        let st = RobotState {
            phi: FRAC_PI_6,
            ..Default::default()
        };
        let r = ActuationRates {
            alpha_dot: 2.0,
            ..Default::default()
        };
        assert_abs_diff_eq!(heading_rate(RobotClass::RS, &st, &r), -1.0, epsilon = 1e-15);
        assert_eq!(
            heading_rate(RobotClass::RS, &RobotState::default(), &r).abs(),
            0.0
        );

        let turn = ActuationRates {
            psi_dot: 0.7,
            ..Default::default()
        };
        assert_eq!(heading_rate(RobotClass::ThreeR, &st, &turn), -0.7);
        assert_eq!(heading_rate(RobotClass::RT, &st, &turn), -0.7);
    }

    #[test]
    fn center_point_examples() {
        let flat = SurfaceSample::from_slopes(0.0, 0.0);
        close(
            center_point(&RobotState::default(), &flat, 0.2),
            [0.0, 0.0, 0.2],
            1e-15,
        );

        let s = SurfaceSample::from_slopes(1.0, 0.0);
        let st = RobotState {
            p0: [1.0, 0.0, 1.0],
            psi: 0.4,
            ..Default::default()
        };
        let c = center_point(&st, &s, 0.2);
        close(
            c,
            [1.0 - 0.2 * FRAC_1_SQRT_2, 0.0, 1.0 + 0.2 * FRAC_1_SQRT_2],
            1e-15,
        );
        close(c, center_point_via_transform(&st, &s, 0.2), 1e-12);
    }

    #[test]
    fn class_names_round_trip() {
        for c in RobotClass::ALL {
            assert_eq!(c.as_str().parse::<RobotClass>().unwrap(), c);
        }
        assert_eq!("rt".parse::<RobotClass>().unwrap(), RobotClass::RT);
        assert!("4R".parse::<RobotClass>().is_err());
    }
}
