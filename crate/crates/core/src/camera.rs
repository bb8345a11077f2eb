use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pinhole camera with square pixels and the principal point at the raster center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CameraRecord", into = "CameraRecord")]
pub struct CameraModel {
    fov_deg: f64,
    width: usize,
    height: usize,
    focal_px: f64,
}

/// Serialized form; `focal_px` is written for readers but recomputed on load.
#[derive(Serialize, Deserialize)]
struct CameraRecord {
    fov_deg: f64,
    width: usize,
    height: usize,
    #[serde(default)]
    focal_px: Option<f64>,
}

impl TryFrom<CameraRecord> for CameraModel {
    type Error = Error;

    fn try_from(r: CameraRecord) -> Result<Self> {
        CameraModel::new(r.fov_deg, r.width, r.height)
    }
}

impl From<CameraModel> for CameraRecord {
    fn from(c: CameraModel) -> Self {
        CameraRecord {
            fov_deg: c.fov_deg,
            width: c.width,
            height: c.height,
            focal_px: Some(c.focal_px),
        }
    }
}

impl CameraModel {
    pub const DEFAULT_FOV_DEG: f64 = 65.0;
    pub const DEFAULT_RESOLUTION: usize = 1024;

    /// `fov_deg` is the horizontal field of view.
    pub fn new(fov_deg: f64, width: usize, height: usize) -> Result<Self> {
        if !(fov_deg > 0.0 && fov_deg < 180.0) {
            return Err(Error::invalid(format!(
                "field of view must lie in (0, 180) degrees, got {fov_deg}"
            )));
        }
        if width == 0 || height == 0 {
            return Err(Error::invalid(format!(
                "camera raster must be non-empty, got {width}x{height}"
            )));
        }
        let focal_px = (width as f64 / 2.0) / (fov_deg.to_radians() / 2.0).tan();
        Ok(Self {
            fov_deg,
            width,
            height,
            focal_px,
        })
    }

    /// 1024x1024, 65 degree field of view.
    pub fn standard() -> Self {
        Self::new(Self::DEFAULT_FOV_DEG, Self::DEFAULT_RESOLUTION, Self::DEFAULT_RESOLUTION)
            .expect("default camera is valid")
    }

    /// Same field of view, resized raster.
    pub fn with_resolution(&self, width: usize, height: usize) -> Result<Self> {
        Self::new(self.fov_deg, width, height)
    }

    pub fn fov_deg(&self) -> f64 {
        self.fov_deg
    }

    pub fn fov_rad(&self) -> f64 {
        self.fov_deg.to_radians()
    }

    pub fn half_fov_rad(&self) -> f64 {
        self.fov_rad() / 2.0
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn focal_px(&self) -> f64 {
        self.focal_px
    }

    /// Principal point `(width / 2, height / 2)`.
    pub fn center(&self) -> (f64, f64) {
        (self.width as f64 / 2.0, self.height as f64 / 2.0)
    }

    /// Off-axis angle of pixel `(x, y)`, measured at the pixel's integer coordinate.
    pub fn off_axis_angle(&self, x: f64, y: f64) -> f64 {
        let (cx, cy) = self.center();
        ((x - cx).hypot(y - cy) / self.focal_px).atan()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_focal_length() {
        let cam = CameraModel::standard();
        // 512 / tan(32.5 deg)
        assert!((cam.focal_px() - 803.679).abs() < 0.01, "{}", cam.focal_px());
    }

    #[test]
    fn rejects_bad_fov() {
        assert!(CameraModel::new(0.0, 10, 10).is_err());
        assert!(CameraModel::new(180.0, 10, 10).is_err());
        assert!(CameraModel::new(65.0, 0, 10).is_err());
    }

    #[test]
    fn serde_recomputes_focal() {
        let json = r#"{"fov_deg":65.0,"width":1024,"height":1024,"focal_px":1.0}"#;
        let cam: CameraModel = serde_json::from_str(json).unwrap();
        assert_eq!(cam, CameraModel::standard());
    }
}
