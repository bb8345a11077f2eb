use super::Texture;
use crate::camera::CameraModel;

/// `cos^4` of the off-axis angle `atan(r / f)`.
///
/// Evaluated as `1 / (1 + (r/f)^2)^2`, the same quantity without the
/// round trip through `atan` and `cos`.
#[inline]
pub fn cos4_factor(r_px: f64, focal_px: f64) -> f64 {
    let q = r_px / focal_px;
    let d = 1.0 + q * q;
    1.0 / (d * d)
}

/// Natural-vignetting field `E0 * cos^4(theta)` over the camera raster, with
/// the off-axis angle taken from each pixel's distance to the raster center.
pub fn vignette_field(e0: u8, cam: &CameraModel) -> Texture {
    let (w, h) = (cam.width(), cam.height());
    let (cx, cy) = cam.center();
    let f = cam.focal_px();
    let e0 = e0 as f64;
    let mut tex = Texture::zeros(w, h);
    for y in 0..h {
        for x in 0..w {
            let r = (x as f64 - cx).hypot(y as f64 - cy);
            tex.values[y * w + x] = e0 * cos4_factor(r, f);
        }
    }
    tex
}
