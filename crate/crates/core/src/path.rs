//! Desired trajectories, lifted onto the terrain.
//!
//! Each path is defined by its horizontal motion `(x_d(t), y_d(t))`; the height
//! is `f(x_d, y_d)` and its rate comes from the chain rule.

use thiserror::Error;

use crate::terrain::{Surface, Terrain};
use crate::vecmath::Vec3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PathError {
    #[error("path parameter {name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },
    #[error("circle radius must be positive, got {0}")]
    Radius(f64),
}

/// Which reading of the benchmark trajectory to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathVariant {
    /// `x = y = A cos(w t)`: a back-and-forth diagonal segment.
    Literal,
    /// `x = A cos(w t)`, `y = A sin(w t)`: a closed loop.
    SineCorrected,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathKind {
    Benchmark {
        variant: PathVariant,
        amplitude: f64,
        rate: f64,
    },
    Circle {
        center: [f64; 2],
        radius: f64,
        rate: f64,
        phase: f64,
    },
    Line {
        start: [f64; 2],
        velocity: [f64; 2],
    },
}

pub const BENCHMARK_AMPLITUDE: f64 = 2.0;
/// `5 / 100` rad/s.
pub const BENCHMARK_RATE: f64 = 0.05;

impl PathKind {
    pub fn benchmark(variant: PathVariant) -> Self {
        PathKind::Benchmark {
            variant,
            amplitude: BENCHMARK_AMPLITUDE,
            rate: BENCHMARK_RATE,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PathKind::Benchmark {
                variant: PathVariant::Literal,
                ..
            } => "paper-eq60-literal",
            PathKind::Benchmark {
                variant: PathVariant::SineCorrected,
                ..
            } => "paper-eq60-sine-corrected",
            PathKind::Circle { .. } => "circle",
            PathKind::Line { .. } => "line",
        }
    }

    pub fn validate(&self) -> Result<(), PathError> {
        let params: Vec<(&'static str, f64)> = match *self {
            PathKind::Benchmark {
                amplitude, rate, ..
            } => vec![("amplitude", amplitude), ("rate", rate)],
            PathKind::Circle {
                center,
                radius,
                rate,
                phase,
            } => {
                if !(radius > 0.0) {
                    return Err(PathError::Radius(radius));
                }
                vec![
                    ("center_x", center[0]),
                    ("center_y", center[1]),
                    ("radius", radius),
                    ("rate", rate),
                    ("phase", phase),
                ]
            }
            PathKind::Line { start, velocity } => vec![
                ("start_x", start[0]),
                ("start_y", start[1]),
                ("velocity_x", velocity[0]),
                ("velocity_y", velocity[1]),
            ],
        };
        match params.into_iter().find(|(_, v)| !v.is_finite()) {
            Some((name, value)) => Err(PathError::NonFinite { name, value }),
            None => Ok(()),
        }
    }

    /// Horizontal position and velocity `([x, y], [x_dot, y_dot])`.
    pub fn planar(&self, t: f64) -> ([f64; 2], [f64; 2]) {
        match *self {
            PathKind::Benchmark {
                variant,
                amplitude,
                rate,
            } => {
                let (s, c) = (rate * t).sin_cos();
                let x = amplitude * c;
                let xd = -amplitude * rate * s;
                match variant {
                    PathVariant::Literal => ([x, x], [xd, xd]),
                    PathVariant::SineCorrected => ([x, amplitude * s], [xd, amplitude * rate * c]),
                }
            }
            PathKind::Circle {
                center,
                radius,
                rate,
                phase,
            } => {
                let (s, c) = (rate * t + phase).sin_cos();
                (
                    [center[0] + radius * c, center[1] + radius * s],
                    [-radius * rate * s, radius * rate * c],
                )
            }
            PathKind::Line { start, velocity } => (
                [start[0] + velocity[0] * t, start[1] + velocity[1] * t],
                velocity,
            ),
        }
    }
}

/// A path on a particular surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesiredPath {
    pub kind: PathKind,
    pub surface: Surface,
}

impl DesiredPath {
    pub fn new(kind: PathKind, surface: Surface) -> Result<Self, PathError> {
        kind.validate()?;
        Ok(DesiredPath { kind, surface })
    }

    pub fn position(&self, t: f64) -> Vec3 {
        let ([x, y], _) = self.kind.planar(t);
        [x, y, self.surface.height(x, y)]
    }

    pub fn velocity(&self, t: f64) -> Vec3 {
        let ([x, y], [xd, yd]) = self.kind.planar(t);
        let (fx, fy) = self.surface.gradient(x, y);
        [xd, yd, fx * xd + fy * yd]
    }

    pub fn label(&self) -> String {
        format!("{} on {}", self.kind.name(), self.surface)
    }
}

pub fn make_benchmark_path(variant: PathVariant, surface: Surface) -> DesiredPath {
    DesiredPath {
        kind: PathKind::benchmark(variant),
        surface,
    }
}
