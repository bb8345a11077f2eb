use serde::{Deserialize, Serialize};

use super::Texture;
use crate::error::{Error, Result};

/// Shape of one dust grain: a bivariate Gaussian intensity drop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrainParams {
    /// Intensity drop at the grain center.
    pub peak: f64,
    /// Standard deviation along columns, pixels.
    pub sigma_xx: f64,
    /// Standard deviation along rows, pixels.
    pub sigma_yy: f64,
    /// Cross term; only the axis-aligned form is supported.
    #[serde(default)]
    pub sigma_xy: f64,
}

impl GrainParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.peak, self.sigma_xx, self.sigma_yy, self.sigma_xy]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.peak < 0.0 || self.peak > 255.0 {
            return Err(Error::invalid(format!("grain peak {} outside [0, 255]", self.peak)));
        }
        if self.sigma_xx <= 0.0 || self.sigma_yy <= 0.0 {
            return Err(Error::invalid(format!(
                "grain sigmas must be positive, got ({}, {})",
                self.sigma_xx, self.sigma_yy
            )));
        }
        if self.sigma_xy != 0.0 {
            return Err(Error::invalid("grain sigma_xy must be 0"));
        }
        Ok(())
    }

    /// Half side of the square grid: `ceil(3 * max sigma)`.
    pub fn half_extent(&self) -> usize {
        (3.0 * self.sigma_xx.max(self.sigma_yy)).ceil() as usize
    }

    /// Gaussian value at offset `(dx, dy)` from the center, ignoring the grid cut.
    pub fn gaussian(&self, dx: f64, dy: f64) -> f64 {
        let e = dx * dx / (self.sigma_xx * self.sigma_xx) + dy * dy / (self.sigma_yy * self.sigma_yy);
        self.peak * (-0.5 * e).exp()
    }
}

/// Grain texture on a `(2h + 1)`-square grid, `h = ceil(3 sigma_max)`. Cells
/// whose centers fall outside the inscribed circle (radius `h + 1/2`) are zero.
pub fn dust_grain(params: &GrainParams) -> Result<Texture> {
    params.validate()?;
    let half = params.half_extent() as i64;
    let side = (2 * half + 1) as usize;
    let r_in = half as f64 + 0.5;
    let mut tex = Texture::zeros(side, side);
    for y in -half..=half {
        for x in -half..=half {
            let (dx, dy) = (x as f64, y as f64);
            if dx * dx + dy * dy <= r_in * r_in {
                tex.values[(y + half) as usize * side + (x + half) as usize] = params.gaussian(dx, dy);
            }
        }
    }
    Ok(tex)
}
