//! Dust on the optics: Gaussian intensity drops composited on the I channel.

use super::params::{DustParams, FaultRanges, PlacedGrain};
use crate::error::{Error, Result};
use crate::raster::{with_intensity, FaultMask, ImageRgbi, INTENSITY};
use crate::rng::SeededRng;
use crate::textures::{dust_grain, GrainParams};

/// Draws `count` grains with independent shapes at uniform centers.
pub fn sample_dust(
    count: usize,
    dims: (usize, usize),
    ranges: &FaultRanges,
    rng: &mut SeededRng,
) -> DustParams {
    let grains = (0..count)
        .map(|_| PlacedGrain {
            x: rng.below(dims.0 as u64) as i64,
            y: rng.below(dims.1 as u64) as i64,
            shape: GrainParams {
                peak: rng.closed_uniform(ranges.grain_peak.min, ranges.grain_peak.max),
                sigma_xx: rng.closed_uniform(ranges.grain_sigma.min, ranges.grain_sigma.max),
                sigma_yy: rng.closed_uniform(ranges.grain_sigma.min, ranges.grain_sigma.max),
                sigma_xy: 0.0,
            },
        })
        .collect();
    DustParams { count, grains }
}

impl DustParams {
    pub fn validate(&self) -> Result<()> {
        if self.count != self.grains.len() {
            return Err(Error::invalid(format!(
                "dust count {} does not match {} grain records",
                self.count,
                self.grains.len()
            )));
        }
        self.grains.iter().try_for_each(|g| g.shape.validate())
    }
}

/// Quantized summed grain texture over the raster.
pub fn dust_texture(params: &DustParams, dims: (usize, usize)) -> Result<Vec<u8>> {
    params.validate()?;
    let (w, h) = dims;
    let mut total = vec![0.0f64; w * h];
    for grain in &params.grains {
        let tex = dust_grain(&grain.shape)?;
        let half = (tex.width / 2) as i64;
        for ty in 0..tex.height {
            let y = grain.y + ty as i64 - half;
            if y < 0 || y >= h as i64 {
                continue;
            }
            for tx in 0..tex.width {
                let x = grain.x + tx as i64 - half;
                if x < 0 || x >= w as i64 {
                    continue;
                }
                total[y as usize * w + x as usize] += tex.get(tx, ty);
            }
        }
    }
    Ok(total.into_iter().map(crate::raster::quantize).collect())
}

/// Subtracts the grain texture from intensity and rescales RGB to match.
/// The mask marks every pixel whose quantized drop is at least 1.
pub fn apply_dust(img: &ImageRgbi, params: &DustParams) -> Result<(ImageRgbi, FaultMask)> {
    let drop = dust_texture(params, img.dims())?;
    let mut out = img.clone();
    let mut bits = vec![false; drop.len()];
    for ((px, &t), bit) in out.pixels_mut().iter_mut().zip(&drop).zip(&mut bits) {
        if t == 0 {
            continue;
        }
        *bit = true;
        let new_i = px[INTENSITY].saturating_sub(t);
        *px = with_intensity(*px, new_i);
    }
    let mask = FaultMask::from_bits(img.width(), img.height(), bits)?;
    Ok((out, mask))
}

/// Draws `n_grains` random grains (count within the configured range) and applies them.
pub fn inject_dust(
    img: &ImageRgbi,
    n_grains: usize,
    ranges: &FaultRanges,
    rng: &mut SeededRng,
) -> Result<(ImageRgbi, FaultMask)> {
    if !ranges.dust_grains.contains(n_grains) {
        return Err(Error::invalid(format!(
            "dust grain count {n_grains} outside [{}, {}]",
            ranges.dust_grains.min, ranges.dust_grains.max
        )));
    }
    let params = sample_dust(n_grains, img.dims(), ranges, rng);
    apply_dust(img, &params)
}
