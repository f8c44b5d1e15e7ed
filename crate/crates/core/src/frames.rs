//! Contact-frame geometry for a sphere resting on a terrain.
//!
//! Given the slopes `(f_x, f_y)` at the contact point this module builds the
//! robot-side unit normal, the tilt rotation taking the world vertical onto that
//! normal (closed form and quaternion form), and the 4x4 homogeneous transform
//! from the robot's local frame to the world frame.
//!
//! All matrix entries are written in terms of `s_n = (1 + f_x^2 + f_y^2)^(-1/2)`
//! and `q_c = s_n^2 / (1 + s_n)`. The latter equals `(1 - s_n) / (f_x^2 + f_y^2)`
//! wherever the slope is nonzero and tends to 1/2 on flat ground, so the
//! transform stays finite and continuous at horizontal contact points.

use thiserror::Error;

use crate::terrain::Terrain;
use crate::vecmath::{cross, Mat3, Vec3};

/// Squared slope magnitude below which the Euler axis is reported as undefined.
pub const DEGENERACY_EPS: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrameError {
    #[error("local velocity must lie in the tangent plane (w = 0), got w = {0}")]
    NormalVelocity(f64),
}

/// Local geometry of the terrain at one contact point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceSample {
    pub fx: f64,
    pub fy: f64,
    pub s_n: f64,
    pub q_c: f64,
    /// Robot-side unit normal, pointing from the contact point towards the sphere center.
    pub n_hat: Vec3,
}

impl SurfaceSample {
    pub fn from_slopes(fx: f64, fy: f64) -> Self {
        let s_n = 1.0 / (1.0 + fx * fx + fy * fy).sqrt();
        let q_c = s_n * s_n / (1.0 + s_n);
        SurfaceSample {
            fx,
            fy,
            s_n,
            q_c,
            n_hat: [-s_n * fx, -s_n * fy, s_n],
        }
    }

    #[inline]
    pub fn slope_sq(&self) -> f64 {
        self.fx * self.fx + self.fy * self.fy
    }
}

pub fn sample_surface<T: Terrain + ?Sized>(surface: &T, x: f64, y: f64) -> SurfaceSample {
    let (fx, fy) = surface.gradient(x, y);
    SurfaceSample::from_slopes(fx, fy)
}

/// Axis-angle description of the tilt from the world vertical to `n_hat`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerRotation {
    pub e_hat: Vec3,
    pub gamma: f64,
    /// Set when the contact is horizontal and the axis is undefined.
    pub degenerate: bool,
}

pub fn euler_rotation(sample: &SurfaceSample) -> EulerRotation {
    let r2 = sample.slope_sq();
    if r2 <= DEGENERACY_EPS {
        return EulerRotation {
            e_hat: [0.0; 3],
            gamma: 0.0,
            degenerate: true,
        };
    }
    let r = r2.sqrt();
    EulerRotation {
        e_hat: [sample.fy / r, -sample.fx / r, 0.0],
        // sin(gamma) = s_n r, cos(gamma) = s_n; the common factor s_n drops out.
        gamma: r.atan2(1.0),
        degenerate: false,
    }
}

/// Tilt rotation in closed form. Maps `[0, 0, 1]` onto `n_hat`.
pub fn rotation_rodrigues(sample: &SurfaceSample) -> Mat3 {
    let SurfaceSample {
        fx, fy, s_n, q_c, ..
    } = *sample;
    [
        [1.0 - q_c * fx * fx, -q_c * fx * fy, -s_n * fx],
        [-q_c * fx * fy, 1.0 - q_c * fy * fy, -s_n * fy],
        [s_n * fx, s_n * fy, s_n],
    ]
}

/// Unit quaternion `(w, i, j, k)`, Hamilton convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quaternion {
    pub w: f64,
    pub i: f64,
    pub j: f64,
    pub k: f64,
}

impl Quaternion {
    pub const IDENTITY: Quaternion = Quaternion {
        w: 1.0,
        i: 0.0,
        j: 0.0,
        k: 0.0,
    };

    pub fn norm(&self) -> f64 {
        (self.w * self.w + self.i * self.i + self.j * self.j + self.k * self.k).sqrt()
    }

    /// Rotation matrix of `p -> q p q^-1` for a unit quaternion.
    pub fn to_matrix(&self) -> Mat3 {
        let Quaternion { w, i, j, k } = *self;
        [
            [
                1.0 - 2.0 * (j * j + k * k),
                2.0 * (i * j - k * w),
                2.0 * (i * k + j * w),
            ],
            [
                2.0 * (i * j + k * w),
                1.0 - 2.0 * (i * i + k * k),
                2.0 * (j * k - i * w),
            ],
            [
                2.0 * (i * k - j * w),
                2.0 * (j * k + i * w),
                1.0 - 2.0 * (i * i + j * j),
            ],
        ]
    }
}

/// Quaternion of the tilt rotation: `cos(gamma/2) + sin(gamma/2) (e_x i + e_y j)`.
pub fn tilt_quaternion(sample: &SurfaceSample) -> Quaternion {
    // cos(gamma) = s_n, and 1 - s_n = q_c (f_x^2 + f_y^2) without cancellation,
    // so sin(gamma/2) e_hat = sqrt(q_c / 2) [f_y, -f_x, 0] with no division by r.
    let w = (0.5 * (1.0 + sample.s_n)).sqrt();
    let h = (0.5 * sample.q_c).sqrt();
    Quaternion {
        w,
        i: h * sample.fy,
        j: -h * sample.fx,
        k: 0.0,
    }
}

pub fn rotation_quaternion(sample: &SurfaceSample) -> Mat3 {
    tilt_quaternion(sample).to_matrix()
}

/// Tangent-frame lateral axis `n_hat x i_T`, where `i_T` is the first column
/// of the tilt rotation. Diagnostic only.
pub fn tangent_lateral_axis(sample: &SurfaceSample) -> Vec3 {
    let r = rotation_rodrigues(sample);
    cross(sample.n_hat, [r[0][0], r[1][0], r[2][0]])
}

/// Homogeneous local-to-world transform, stored row-major.
///
/// The rotation block's columns are the local heading, lateral and normal axes
/// expressed in world coordinates; the last column is the contact point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformLW {
    pub a: [f64; 16],
}

impl TransformLW {
    pub const IDENTITY: TransformLW = TransformLW {
        a: [
            1.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 1.0, 0.0, //
            0.0, 0.0, 0.0, 1.0,
        ],
    };

    /// Entry at zero-based `(row, col)`.
    #[inline]
    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.a[row * 4 + col]
    }

    pub fn rotation(&self) -> Mat3 {
        let mut r = [[0.0; 3]; 3];
        for (i, row) in r.iter_mut().enumerate() {
            row.copy_from_slice(&self.a[i * 4..i * 4 + 3]);
        }
        r
    }

    pub fn column(&self, col: usize) -> Vec3 {
        [self.at(0, col), self.at(1, col), self.at(2, col)]
    }

    /// Local longitudinal axis in world coordinates.
    pub fn heading(&self) -> Vec3 {
        self.column(0)
    }

    pub fn lateral(&self) -> Vec3 {
        self.column(1)
    }

    pub fn normal(&self) -> Vec3 {
        self.column(2)
    }

    pub fn translation(&self) -> Vec3 {
        self.column(3)
    }

    /// Applies the transform to a homogeneous point `[p, 1]`.
    pub fn transform_point(&self, p: Vec3) -> Vec3 {
        let mut out = self.translation();
        for (i, o) in out.iter_mut().enumerate() {
            *o += self.at(i, 0) * p[0] + self.at(i, 1) * p[1] + self.at(i, 2) * p[2];
        }
        out
    }
}

/// Local-to-world transform at contact point `p0` with turning angle `psi`.
///
/// Positive `psi` turns the local frame clockwise about the normal, i.e. the
/// heading on flat ground is `[cos psi, -sin psi, 0]`.
pub fn transform_lw(p0: Vec3, sample: &SurfaceSample, psi: f64) -> TransformLW {
    let SurfaceSample {
        fx, fy, s_n, q_c, ..
    } = *sample;
    let (sp, cp) = psi.sin_cos();
    let rxx = 1.0 - q_c * fx * fx;
    let ryy = 1.0 - q_c * fy * fy;
    let rxy = q_c * fx * fy;

    let a11 = rxx * cp + rxy * sp;
    let a12 = rxx * sp - rxy * cp;
    let a21 = -rxy * cp - ryy * sp;
    let a22 = -rxy * sp + ryy * cp;
    let a31 = s_n * fx * cp - s_n * fy * sp;
    let a32 = s_n * fx * sp + s_n * fy * cp;

    TransformLW {
        a: [
            a11,
            a12,
            -s_n * fx,
            p0[0], //
            a21,
            a22,
            -s_n * fy,
            p0[1], //
            a31,
            a32,
            s_n,
            p0[2], //
            0.0,
            0.0,
            0.0,
            1.0,
        ],
    }
}

/// Maps a tangent-plane velocity `[u, v, 0]` from the local frame to the world.
pub fn velocity_to_world(t: &TransformLW, v_local: Vec3) -> Result<Vec3, FrameError> {
    if v_local[2] != 0.0 {
        return Err(FrameError::NormalVelocity(v_local[2]));
    }
    let [g1, g2, _] = v_local;
    Ok([
        t.at(0, 0) * g1 + t.at(0, 1) * g2,
        t.at(1, 0) * g1 + t.at(1, 1) * g2,
        t.at(2, 0) * g1 + t.at(2, 1) * g2,
    ])
}
