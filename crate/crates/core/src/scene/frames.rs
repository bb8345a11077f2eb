//! Local-Level, Sun-aligned datum and camera frames.
//!
//! Local-Level `L`: x north, z along effective gravity (down), y completes
//! the right-handed triad. The datum frame `A` has its z-axis on the Sun;
//! a zero attitude puts the camera boresight there. Body and camera frames
//! coincide, boresight `+z`, image columns along `+x`, rows along `+y`.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::camera::CameraModel;
use crate::error::{Error, Result};

/// Recorded in manifests alongside the angles.
pub const EULER_CONVENTION: &str = "intrinsic-zyx (yaw, pitch, roll), passive datum->body";

/// Direction cosine matrix mapping vector coordinates from one frame to another.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameRotation(Matrix3<f64>);

impl FrameRotation {
    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    /// Wraps a matrix without checking orthonormality.
    pub fn from_matrix_unchecked(m: Matrix3<f64>) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn apply(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.0 * v
    }

    pub fn inverse(&self) -> Self {
        Self(self.0.transpose())
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &FrameRotation) -> Self {
        Self(next.0 * self.0)
    }

    pub fn orthonormality_error(&self) -> f64 {
        (self.0 * self.0.transpose() - Matrix3::identity()).abs().max()
    }
}

/// Sun direction in `L` from azimuth (from north towards y) and elevation
/// (above the horizon, i.e. against gravity).
pub fn sun_direction(azimuth: f64, elevation: f64) -> Vector3<f64> {
    Vector3::new(
        elevation.cos() * azimuth.cos(),
        elevation.cos() * azimuth.sin(),
        -elevation.sin(),
    )
}

fn rot_x(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(1.0, 0.0, 0.0, 0.0, c, s, 0.0, -s, c)
}

fn rot_y(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(c, 0.0, -s, 0.0, 1.0, 0.0, s, 0.0, c)
}

fn rot_z(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(c, s, 0.0, -s, c, 0.0, 0.0, 0.0, 1.0)
}

/// Datum-to-body rotation for roll `ψ`, pitch `θ`, yaw `φ`: yaw about the
/// Sun axis first, then pitch, then roll.
pub fn attitude_rotation(roll: f64, pitch: f64, yaw: f64) -> FrameRotation {
    FrameRotation(rot_x(roll) * rot_y(pitch) * rot_z(yaw))
}

/// `L`-to-datum rotation: z onto the Sun, x horizontal, y towards gravity.
pub fn sun_aligned_frame(sun_dir_l: &Vector3<f64>) -> FrameRotation {
    let z = sun_dir_l.normalize();
    let gravity = Vector3::new(0.0, 0.0, 1.0);
    let mut x = gravity.cross(&z);
    if x.norm() < 1e-9 {
        x = Vector3::new(0.0, 1.0, 0.0).cross(&z);
    }
    let x = x.normalize();
    let y = z.cross(&x);
    FrameRotation(Matrix3::from_rows(&[x.transpose(), y.transpose(), z.transpose()]))
}

/// Where the Sun falls on the image plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SunPixel {
    /// Column.
    pub u: f64,
    /// Row.
    pub v: f64,
    pub in_fov: bool,
    /// Sun on the negative boresight half-space.
    pub behind: bool,
}

impl SunPixel {
    /// A Sun known to be ahead of the camera at `(u, v)`.
    pub fn ahead(u: f64, v: f64, cam: &CameraModel) -> Self {
        Self {
            u,
            v,
            in_fov: inside_raster(u, v, cam),
            behind: false,
        }
    }

    /// Inside the raster grown by `margin` of its width/height on every side.
    pub fn within_margin(&self, cam: &CameraModel, margin: f64) -> bool {
        if self.behind {
            return false;
        }
        let mw = margin * cam.width() as f64;
        let mh = margin * cam.height() as f64;
        self.u >= -mw
            && self.u < cam.width() as f64 + mw
            && self.v >= -mh
            && self.v < cam.height() as f64 + mh
    }
}

fn inside_raster(u: f64, v: f64, cam: &CameraModel) -> bool {
    u >= 0.0 && v >= 0.0 && u < cam.width() as f64 && v < cam.height() as f64
}

/// Pinhole projection of a unit direction given in the camera frame.
pub fn project_sun(sun_dir_cam: &Vector3<f64>, cam: &CameraModel) -> Result<SunPixel> {
    let norm = sun_dir_cam.norm();
    if !norm.is_finite() || (norm - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!(
            "sun direction must be a unit vector, norm is {norm}"
        )));
    }
    let (cx, cy) = cam.center();
    let f = cam.focal_px();
    let behind = sun_dir_cam.z <= 0.0;
    let (u, v) = if sun_dir_cam.z.abs() > 1e-12 {
        (
            cx + f * sun_dir_cam.x / sun_dir_cam.z,
            cy + f * sun_dir_cam.y / sun_dir_cam.z,
        )
    } else {
        // On the image-plane horizon: push far out along the direction.
        (cx + 1e9 * sun_dir_cam.x, cy + 1e9 * sun_dir_cam.y)
    };
    Ok(SunPixel {
        u,
        v,
        in_fov: !behind && inside_raster(u, v, cam),
        behind,
    })
}
