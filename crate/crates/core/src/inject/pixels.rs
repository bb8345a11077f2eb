//! Broken (hot) pixels with demosaicing spread and CCD readout smear.

use super::params::{BrokenPixelParams, DefectPixel, FaultRanges, LineDirection, SensorArchitecture};
use crate::error::{Error, Result};
use crate::raster::{saturating_add, with_intensity, FaultMask, ImageRgbi, INTENSITY};
use crate::rng::SeededRng;

const VON_NEUMANN: [(i64, i64); 4] = [(0, -1), (0, 1), (1, 0), (-1, 0)];

/// Draws `count` distinct defect positions with uniform brightness. On CCDs
/// each defect also gets a subtended-line offset in
/// `[0, min(cap, ratio * brightness)]` and `direction` must be given.
pub fn sample_broken_pixels(
    count: usize,
    sensor: SensorArchitecture,
    direction: LineDirection,
    dims: (usize, usize),
    ranges: &FaultRanges,
    rng: &mut SeededRng,
) -> Result<BrokenPixelParams> {
    let (w, h) = dims;
    if count == 0 || count > w * h {
        return Err(Error::invalid(format!(
            "cannot place {count} broken pixels in a {w}x{h} raster"
        )));
    }
    let pixels = rng
        .distinct((w * h) as u64, count)
        .into_iter()
        .map(|i| {
            let brightness = rng.int_inclusive(
                ranges.pixel_brightness.min as i64,
                ranges.pixel_brightness.max as i64,
            ) as u8;
            let line_brightness = sensor
                .is_ccd()
                .then(|| rng.int_inclusive(0, ranges.line_brightness_cap(brightness) as i64) as u8);
            DefectPixel {
                x: i as usize % w,
                y: i as usize / w,
                brightness,
                line_brightness,
            }
        })
        .collect();
    Ok(BrokenPixelParams {
        sensor,
        direction: sensor.is_ccd().then_some(direction),
        count,
        pixels,
    })
}

impl BrokenPixelParams {
    pub fn validate(&self, dims: (usize, usize), ranges: &FaultRanges) -> Result<()> {
        if self.count != self.pixels.len() {
            return Err(Error::invalid(format!(
                "broken pixel count {} does not match {} records",
                self.count,
                self.pixels.len()
            )));
        }
        if self.sensor.is_ccd() != self.direction.is_some() {
            return Err(Error::invalid(
                "a subtended-line direction is required for CCD sensors and forbidden otherwise",
            ));
        }
        let mut seen = std::collections::HashSet::new();
        for p in &self.pixels {
            if p.x >= dims.0 || p.y >= dims.1 {
                return Err(Error::invalid(format!("broken pixel ({}, {}) outside raster", p.x, p.y)));
            }
            if !seen.insert((p.x, p.y)) {
                return Err(Error::invalid(format!("broken pixel ({}, {}) listed twice", p.x, p.y)));
            }
            match (self.sensor.is_ccd(), p.line_brightness) {
                (true, Some(l)) if l <= ranges.line_brightness_cap(p.brightness) => {}
                (true, Some(l)) => {
                    return Err(Error::invalid(format!(
                        "subtended line brightness {l} exceeds cap {} for pixel brightness {}",
                        ranges.line_brightness_cap(p.brightness),
                        p.brightness
                    )))
                }
                (true, None) => return Err(Error::invalid("CCD broken pixel without line brightness")),
                (false, Some(_)) => return Err(Error::invalid("CMOS broken pixels have no subtended line")),
                (false, None) => {}
            }
        }
        Ok(())
    }
}

/// Applies defects in three layers so each defect pixel keeps its exact
/// brightness: CCD lines (additive offsets towards the raster edge), then
/// von Neumann neighbours at the midpoint of the defect and the pixel two
/// steps out, then the defects themselves. Interpolation reads the clean image.
pub fn apply_broken_pixels(
    img: &ImageRgbi,
    params: &BrokenPixelParams,
    ranges: &FaultRanges,
) -> Result<(ImageRgbi, FaultMask)> {
    params.validate(img.dims(), ranges)?;
    let mut out = img.clone();
    let mut mask = FaultMask::empty(img.width(), img.height());

    if let Some(direction) = params.direction {
        let (dx, dy) = direction.step();
        for p in &params.pixels {
            let offset = p.line_brightness.unwrap_or(0) as i32;
            let (mut x, mut y) = (p.x as i64 + dx, p.y as i64 + dy);
            while img.contains(x, y) {
                let (ux, uy) = (x as usize, y as usize);
                let px = out.get(ux, uy);
                out.set(ux, uy, with_intensity(px, saturating_add(px[INTENSITY], offset)));
                mask.set(ux, uy);
                x += dx;
                y += dy;
            }
        }
    }

    for p in &params.pixels {
        for (vx, vy) in VON_NEUMANN {
            let (nx, ny) = (p.x as i64 + vx, p.y as i64 + vy);
            if !img.contains(nx, ny) {
                continue;
            }
            let (wx, wy) = (p.x as i64 + 2 * vx, p.y as i64 + 2 * vy);
            let working = if img.contains(wx, wy) {
                img.get(wx as usize, wy as usize)[INTENSITY]
            } else {
                img.get(nx as usize, ny as usize)[INTENSITY]
            };
            let value = ((p.brightness as u16 + working as u16 + 1) / 2) as u8;
            let (nx, ny) = (nx as usize, ny as usize);
            out.set(nx, ny, with_intensity(out.get(nx, ny), value));
            mask.set(nx, ny);
        }
    }

    for p in &params.pixels {
        out.set(p.x, p.y, with_intensity(out.get(p.x, p.y), p.brightness));
        mask.set(p.x, p.y);
    }
    Ok((out, mask))
}

/// Samples and applies `count` broken pixels.
pub fn inject_broken_pixels(
    img: &ImageRgbi,
    count: usize,
    sensor: SensorArchitecture,
    direction: LineDirection,
    ranges: &FaultRanges,
    rng: &mut SeededRng,
) -> Result<(ImageRgbi, FaultMask, BrokenPixelParams)> {
    let params = sample_broken_pixels(count, sensor, direction, img.dims(), ranges, rng)?;
    let (out, mask) = apply_broken_pixels(img, &params, ranges)?;
    Ok((out, mask, params))
}
