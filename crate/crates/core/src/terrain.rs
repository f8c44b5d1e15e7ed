//! Analytic terrains `z = f(x, y)` with closed-form slopes.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TerrainError {
    #[error("sinusoidal amplitude must be finite and >= 0, got {0}")]
    Amplitude(f64),
    #[error("sinusoidal spatial frequency must be finite, got {0}")]
    Frequency(f64),
    #[error("plane slopes must be finite, got ({0}, {1})")]
    Slope(f64, f64),
}

/// A smooth height field with an analytic gradient.
pub trait Terrain {
    fn height(&self, x: f64, y: f64) -> f64;

    /// Partial derivatives `(f_x, f_y)`.
    fn gradient(&self, x: f64, y: f64) -> (f64, f64);

    fn label(&self) -> String;
}

/// Parameters of `a (cos(omega x) + cos(omega y) - 2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinusoidalParams {
    pub a: f64,
    pub omega: f64,
}

impl SinusoidalParams {
    pub fn validate(&self) -> Result<(), TerrainError> {
        if !(self.a.is_finite() && self.a >= 0.0) {
            return Err(TerrainError::Amplitude(self.a));
        }
        if !self.omega.is_finite() {
            return Err(TerrainError::Frequency(self.omega));
        }
        Ok(())
    }
}

/// The built-in terrains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Surface {
    Sinusoidal(SinusoidalParams),
    Plane { slope_x: f64, slope_y: f64 },
}

pub fn make_sinusoidal(params: SinusoidalParams) -> Result<Surface, TerrainError> {
    params.validate()?;
    Ok(Surface::Sinusoidal(params))
}

pub fn make_plane(slope_x: f64, slope_y: f64) -> Result<Surface, TerrainError> {
    if !(slope_x.is_finite() && slope_y.is_finite()) {
        return Err(TerrainError::Slope(slope_x, slope_y));
    }
    Ok(Surface::Plane { slope_x, slope_y })
}

impl Surface {
    pub fn validate(&self) -> Result<(), TerrainError> {
        match *self {
            Surface::Sinusoidal(p) => p.validate(),
            Surface::Plane { slope_x, slope_y } => make_plane(slope_x, slope_y).map(|_| ()),
        }
    }
}

impl Terrain for Surface {
    fn height(&self, x: f64, y: f64) -> f64 {
        match *self {
            Surface::Sinusoidal(SinusoidalParams { a, omega }) => {
                a * ((omega * x).cos() + (omega * y).cos() - 2.0)
            }
            Surface::Plane { slope_x, slope_y } => slope_x * x + slope_y * y,
        }
    }

    fn gradient(&self, x: f64, y: f64) -> (f64, f64) {
        match *self {
            Surface::Sinusoidal(SinusoidalParams { a, omega }) => (
                -a * omega * (omega * x).sin(),
                -a * omega * (omega * y).sin(),
            ),
            Surface::Plane { slope_x, slope_y } => (slope_x, slope_y),
        }
    }

    fn label(&self) -> String {
        self.to_string()
    }
}

impl<T: Terrain + ?Sized> Terrain for &T {
    fn height(&self, x: f64, y: f64) -> f64 {
        (**self).height(x, y)
    }
    fn gradient(&self, x: f64, y: f64) -> (f64, f64) {
        (**self).gradient(x, y)
    }
    fn label(&self) -> String {
        (**self).label()
    }
}

impl fmt::Display for Surface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Surface::Sinusoidal(p) => write!(f, "sinusoidal(a={}, omega={})", p.a, p.omega),
            Surface::Plane { slope_x, slope_y } => write!(f, "plane({slope_x}, {slope_y})"),
        }
    }
}

/// Max relative error of the analytic gradient against central differences,
/// `|analytic - numeric| / max(1, |analytic|)` over both partials.
pub fn check_gradient<T: Terrain + ?Sized>(surface: &T, x: f64, y: f64, h: f64) -> f64 {
    assert!(h > 0.0, "finite-difference step must be positive");
    let (fx, fy) = surface.gradient(x, y);
    let nx = (surface.height(x + h, y) - surface.height(x - h, y)) / (2.0 * h);
    let ny = (surface.height(x, y + h) - surface.height(x, y - h)) / (2.0 * h);
    let rel = |analytic: f64, numeric: f64| (analytic - numeric).abs() / analytic.abs().max(1.0);
    rel(fx, nx).max(rel(fy, ny))
}
