//! Procedural straylight primitives in unit coordinates.
//!
//! Flares 1-5 form the close group: dense orbs and halos. Flares 6-10 form
//! the far group: sparse rings, ring pairs and hexagon outlines. Glares are
//! wide hazes centred on the light source. Every primitive is zero outside
//! the unit disk and peaks at 255 in its brightest channel.

use serde::{Deserialize, Serialize};

use super::Texture;
use crate::error::{Error, Result};

pub const FLARE_COUNT: usize = 10;
pub const GLARE_COUNT: usize = 2;

/// Raster radius used when a primitive is rendered on its own.
pub const PRIMITIVE_RASTER_RADIUS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlareGroup {
    Close,
    Far,
}

impl FlareGroup {
    pub fn of(index: u8) -> Result<Self> {
        match index {
            1..=5 => Ok(FlareGroup::Close),
            6..=10 => Ok(FlareGroup::Far),
            _ => Err(Error::invalid(format!("flare index {index} outside [1, 10]"))),
        }
    }
}

fn smoothstep(e0: f64, e1: f64, x: f64) -> f64 {
    let t = ((x - e0) / (e1 - e0)).clamp(0.0, 1.0);
    t * t * (3.0 - 2.0 * t)
}

/// Gaussian band around `center`, cut to exactly zero beyond `cut` widths.
fn band(d: f64, center: f64, width: f64, cut: f64) -> f64 {
    let z = (d - center) / width;
    if z.abs() > cut {
        0.0
    } else {
        (-0.5 * z * z).exp()
    }
}

/// Signed distance-like measure to a hexagon with inradius `a`, rotated by `phase`.
fn hexagon(x: f64, y: f64, a: f64, phase: f64) -> f64 {
    (0..3)
        .map(|k| {
            let t = phase + k as f64 * std::f64::consts::FRAC_PI_3;
            (x * t.cos() + y * t.sin()).abs()
        })
        .fold(f64::MIN, f64::max)
        - a
}

fn tint(color: [f64; 3], p: f64) -> [f64; 3] {
    [color[0] * p, color[1] * p, color[2] * p]
}

/// Color of flare `index` at unit coordinates `(x, y)`, channels in `[0, 1]`.
/// `index` must already be validated.
pub fn flare_sample(index: u8, x: f64, y: f64) -> [f64; 3] {
    let r = x.hypot(y);
    if r > 1.0 {
        return [0.0; 3];
    }
    let edge = 1.0 - smoothstep(0.9, 1.0, r);
    match index {
        // filled orb
        1 => tint([1.0, 0.92, 0.78], (1.0 - r * r).powf(0.7)),
        // soft halo
        2 => tint([0.75, 0.85, 1.0], (-4.0 * r * r).exp() * edge),
        // flat orb with a soft rim
        3 => tint([0.7, 1.0, 0.75], 1.0 - smoothstep(0.7, 1.0, r)),
        // bright core in a dim disk
        4 => tint(
            [1.0, 0.8, 0.55],
            (0.35 + 0.65 * (-r * r / 0.02).exp()) * (1.0 - smoothstep(0.85, 1.0, r)),
        ),
        // chromatic halo: red spreads widest
        5 => [
            (-3.0 * r * r).exp() * edge,
            0.9 * (-3.5 * r * r).exp() * edge,
            0.85 * (-4.5 * r * r).exp() * edge,
        ],
        // thin ring
        6 => tint([0.8, 0.9, 1.0], band(r, 0.85, 0.04, 3.0)),
        // ring pair
        7 => tint(
            [1.0, 0.85, 0.6],
            band(r, 0.6, 0.03, 3.0).max(band(r, 0.9, 0.03, 3.0)),
        ),
        // hexagon outline
        8 => tint([0.7, 1.0, 0.9], band(hexagon(x, y, 0.78, 0.0), 0.0, 0.035, 3.0)),
        // chromatic ring
        9 => [
            band(r, 0.80, 0.05, 3.0),
            band(r, 0.75, 0.05, 3.0),
            band(r, 0.70, 0.05, 3.0),
        ],
        // nested hexagon outlines
        10 => tint(
            [0.9, 0.8, 1.0],
            band(hexagon(x, y, 0.78, std::f64::consts::FRAC_PI_6), 0.0, 0.03, 3.0)
                .max(0.7 * band(hexagon(x, y, 0.5, 0.0), 0.0, 0.03, 3.0)),
        ),
        _ => [0.0; 3],
    }
}

/// Color of glare `index` at unit coordinates, channels in `[0, 1]`.
pub fn glare_sample(index: u8, x: f64, y: f64) -> [f64; 3] {
    let r2 = x * x + y * y;
    if r2 > 1.0 {
        return [0.0; 3];
    }
    match index {
        // isotropic haze
        1 => tint([1.0, 0.97, 0.9], (-3.5 * r2).exp()),
        // horizontal streak over a faint haze
        2 => tint(
            [0.95, 0.95, 1.0],
            0.65 * (-3.2 * x * x - 60.0 * y * y).exp() + 0.35 * (-5.0 * r2).exp(),
        ),
        _ => [0.0; 3],
    }
}

fn rasterize(sample: impl Fn(f64, f64) -> [f64; 3]) -> Texture {
    let r = PRIMITIVE_RASTER_RADIUS as i64;
    let side = (2 * r + 1) as usize;
    let mut tex = Texture::zeros(side, side);
    let mut rgb = vec![[0.0; 3]; side * side];
    for py in -r..=r {
        for px in -r..=r {
            let c = sample(px as f64 / r as f64, py as f64 / r as f64).map(|v| v * 255.0);
            let i = (py + r) as usize * side + (px + r) as usize;
            rgb[i] = c;
            tex.values[i] = c[0].max(c[1]).max(c[2]);
        }
    }
    tex.rgb = Some(rgb);
    tex
}

pub fn validate_flare_index(index: u8) -> Result<()> {
    FlareGroup::of(index).map(|_| ())
}

pub fn validate_glare_index(index: u8) -> Result<()> {
    if (1..=GLARE_COUNT as u8).contains(&index) {
        Ok(())
    } else {
        Err(Error::invalid(format!("glare index {index} outside [1, 2]")))
    }
}

/// Flare `index` rendered on a square raster of radius
/// [`PRIMITIVE_RASTER_RADIUS`] pixels.
pub fn flare_primitive(index: u8) -> Result<Texture> {
    validate_flare_index(index)?;
    Ok(rasterize(|x, y| flare_sample(index, x, y)))
}

pub fn glare_primitive(index: u8) -> Result<Texture> {
    validate_glare_index(index)?;
    Ok(rasterize(|x, y| glare_sample(index, x, y)))
}

#[cfg(test)]
mod tests {
    use super::*;

    const R: usize = PRIMITIVE_RASTER_RADIUS;

    #[test]
    fn groups() {
        assert_eq!(FlareGroup::of(1).unwrap(), FlareGroup::Close);
        assert_eq!(FlareGroup::of(5).unwrap(), FlareGroup::Close);
        assert_eq!(FlareGroup::of(6).unwrap(), FlareGroup::Far);
        assert!(FlareGroup::of(0).is_err());
        assert!(FlareGroup::of(11).is_err());
        assert!(flare_primitive(11).is_err());
        assert!(glare_primitive(3).is_err());
    }

    #[test]
    fn orb_profile_is_monotone() {
        let t = flare_primitive(1).unwrap();
        let row: Vec<f64> = (R..2 * R + 1).map(|x| t.get(x, R)).collect();
        assert!(row.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(t.get(R, R), 255.0);
    }

    #[test]
    fn ring_is_hollow() {
        let t = flare_primitive(6).unwrap();
        assert_eq!(t.get(R, R), 0.0);
        let annulus = R + (0.85 * R as f64).round() as usize;
        assert!(t.get(annulus, R) > 0.0);
    }

    #[test]
    fn zero_outside_unit_disk_and_peak_255() {
        for i in 1..=FLARE_COUNT as u8 {
            let t = flare_primitive(i).unwrap();
            for y in 0..t.height {
                for x in 0..t.width {
                    let (dx, dy) = (x as f64 - R as f64, y as f64 - R as f64);
                    if dx.hypot(dy) > R as f64 {
                        assert_eq!(t.get(x, y), 0.0, "flare {i} at ({x},{y})");
                    }
                }
            }
            assert!(t.max() <= 255.0 + 1e-9);
            assert!(t.max() > 240.0, "flare {i} peak {}", t.max());
        }
    }

    #[test]
    fn glare_profiles() {
        let g1 = glare_primitive(1).unwrap();
        let g2 = glare_primitive(2).unwrap();
        assert_eq!(g1.get(R, R), g1.max());
        for g in [&g1, &g2] {
            let peak = g.max();
            for (x, y) in [(2 * R, R), (0, R), (R, 0), (R, 2 * R)] {
                assert!(g.get(x, y) < 0.05 * peak, "{}", g.get(x, y) / peak);
            }
        }
        let support = g1.values.iter().filter(|&&v| v > 0.0).count();
        let differing = g1
            .values
            .iter()
            .zip(&g2.values)
            .filter(|(a, b)| (*a - *b).abs() >= 1.0)
            .count();
        assert!(differing as f64 >= 0.1 * support as f64);
    }
}
