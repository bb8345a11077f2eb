//! Vignetting: multiplicative cos^4 falloff scaled by E0 / 255.

use super::params::{FaultRanges, VignettingParams};
use crate::camera::CameraModel;
use crate::error::{Error, Result};
use crate::raster::{quantize, FaultMask, ImageRgbi};
use crate::textures::cos4_factor;

/// A factor at or above this leaves every 8-bit value unchanged after
/// rounding (`c - c/510 >= c - 0.5`), so only pixels below it are labelled.
pub const MASK_THRESHOLD: f64 = 1.0 - 1.0 / 510.0;

/// Attenuation at pixel `(x, y)`: `min(1, E0 cos^4(theta) / 255)`.
pub fn attenuation(e0: u8, cam: &CameraModel, x: usize, y: usize) -> f64 {
    let (cx, cy) = cam.center();
    let r = (x as f64 - cx).hypot(y as f64 - cy);
    (e0 as f64 / 255.0 * cos4_factor(r, cam.focal_px())).min(1.0)
}

pub fn apply_vignetting(
    img: &ImageRgbi,
    params: &VignettingParams,
    cam: &CameraModel,
) -> Result<(ImageRgbi, FaultMask)> {
    if img.dims() != (cam.width(), cam.height()) {
        return Err(Error::invalid(format!(
            "image is {}x{} but the camera raster is {}x{}",
            img.width(),
            img.height(),
            cam.width(),
            cam.height()
        )));
    }
    let (w, h) = img.dims();
    let mut out = img.clone();
    let mut mask = FaultMask::empty(w, h);
    for y in 0..h {
        for x in 0..w {
            let f = attenuation(params.e0, cam, x, y);
            if f >= MASK_THRESHOLD {
                continue;
            }
            mask.set(x, y);
            let px = out.get(x, y);
            out.set(x, y, px.map(|c| quantize(c as f64 * f)));
        }
    }
    Ok((out, mask))
}

/// Applies vignetting with `e0` checked against the configured range.
pub fn inject_vignetting(
    img: &ImageRgbi,
    e0: u8,
    cam: &CameraModel,
    ranges: &FaultRanges,
) -> Result<(ImageRgbi, FaultMask)> {
    if !ranges.vignetting_e0.contains(e0) {
        return Err(Error::invalid(format!(
            "E0 {e0} outside [{}, {}]",
            ranges.vignetting_e0.min, ranges.vignetting_e0.max
        )));
    }
    apply_vignetting(img, &VignettingParams { e0 }, cam)
}
