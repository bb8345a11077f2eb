//! Straylight: flares strung along the source-to-center line plus an
//! optional glare on the source, composited additively.

use std::f64::consts::TAU;

use super::params::{FaultRanges, FlarePlacement, FlareSpec, GlarePlacement, StraylightParams};
use crate::error::{Error, Result};
use crate::raster::{intensity_of, FaultMask, ImageRgbi, BLUE, GREEN, INTENSITY, RED};
use crate::rng::SeededRng;
use crate::scene::SunPixel;
use crate::textures::flare::{flare_sample, glare_sample, validate_glare_index};
use crate::textures::{FlareGroup, Texture, FLARE_COUNT, GLARE_COUNT};

/// Primitives peak at 255 and brightness multipliers reach 2.5; these gains
/// bring a single flare back to a visible but mostly unsaturated level.
pub const FLARE_GAIN: f64 = 0.25;
pub const GLARE_GAIN: f64 = 0.2;

/// Contributions whose strongest channel stays below this are dropped, so
/// every pixel the layer touches changes the image by at least 2 levels
/// (unless it saturates).
pub const VISIBILITY_FLOOR: f64 = 2.0;

/// Distance scale of the flare line when the source sits on the image
/// center and the line direction is drawn at random, as a fraction of width.
pub const DEGENERATE_AXIS_SCALE: f64 = 0.25;

fn is_degenerate(sun: [f64; 2], dims: (usize, usize)) -> bool {
    let (cx, cy) = (dims.0 as f64 / 2.0, dims.1 as f64 / 2.0);
    (sun[0] - cx).hypot(sun[1] - cy) < 1e-9
}

/// Draws flare indices, positions, radii and brightness, plus the glare.
/// Positions and radii are each sorted ascending and handed out in index
/// order, so close-group flares always sit nearer the source than far-group
/// ones and grow with distance. `flares` and `glare` override the draws.
pub fn sample_straylight(
    sun: &SunPixel,
    dims: (usize, usize),
    ranges: &FaultRanges,
    flares: Option<&[FlareSpec]>,
    glare: Option<bool>,
    rng: &mut SeededRng,
) -> Result<StraylightParams> {
    if sun.behind {
        return Err(Error::Precondition("straylight needs a light source ahead of the camera".into()));
    }
    let sun_px = [sun.u, sun.v];
    let placements = match flares {
        Some(specs) => specs
            .iter()
            .map(|s| {
                Ok(FlarePlacement {
                    index: s.index,
                    group: FlareGroup::of(s.index)?,
                    position: s.position,
                    radius: s.radius,
                    brightness: s.brightness,
                })
            })
            .collect::<Result<Vec<_>>>()?,
        None => {
            let max = ranges.flares.max.min(FLARE_COUNT);
            let count = rng.int_inclusive(ranges.flares.min as i64, max as i64) as usize;
            let mut indices: Vec<u8> = rng
                .distinct(FLARE_COUNT as u64, count)
                .into_iter()
                .map(|i| i as u8 + 1)
                .collect();
            indices.sort_unstable();
            let mut ts: Vec<f64> = (0..count)
                .map(|_| rng.closed_uniform(ranges.flare_position.min, ranges.flare_position.max))
                .collect();
            let mut radii: Vec<f64> = (0..count)
                .map(|_| rng.closed_uniform(ranges.flare_radius.min, ranges.flare_radius.max))
                .collect();
            ts.sort_by(f64::total_cmp);
            radii.sort_by(f64::total_cmp);
            indices
                .into_iter()
                .zip(ts)
                .zip(radii)
                .map(|((index, position), radius)| {
                    Ok(FlarePlacement {
                        index,
                        group: FlareGroup::of(index)?,
                        position,
                        radius,
                        brightness: rng
                            .closed_uniform(ranges.flare_brightness.min, ranges.flare_brightness.max),
                    })
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    let with_glare = glare.unwrap_or_else(|| rng.bernoulli(ranges.glare_probability));
    let glare = with_glare.then(|| GlarePlacement {
        index: rng.int_inclusive(1, GLARE_COUNT as i64) as u8,
        radius: rng.closed_uniform(ranges.glare_radius.min, ranges.glare_radius.max),
        brightness: rng.closed_uniform(ranges.glare_brightness.min, ranges.glare_brightness.max),
    });
    let degenerate_axis_angle = is_degenerate(sun_px, dims).then(|| rng.uniform(0.0, TAU));
    let params = StraylightParams {
        sun: sun_px,
        count: placements.len(),
        flares: placements,
        glare,
        degenerate_axis_angle,
    };
    params.validate(dims)?;
    Ok(params)
}

impl StraylightParams {
    /// Physical limits only; sampling ranges are not enforced here.
    pub fn validate(&self, dims: (usize, usize)) -> Result<()> {
        if self.count != self.flares.len() {
            return Err(Error::invalid(format!(
                "flare count {} does not match {} records",
                self.count,
                self.flares.len()
            )));
        }
        if !self.sun.iter().all(|c| c.is_finite()) {
            return Err(Error::invalid("light source position must be finite"));
        }
        let mut seen = [false; FLARE_COUNT + 1];
        for f in &self.flares {
            if FlareGroup::of(f.index)? != f.group {
                return Err(Error::invalid(format!("flare {} recorded in the wrong group", f.index)));
            }
            if std::mem::replace(&mut seen[f.index as usize], true) {
                return Err(Error::invalid(format!("flare {} listed twice", f.index)));
            }
            if !f.position.is_finite() || !(f.radius > 0.0 && f.radius.is_finite()) {
                return Err(Error::invalid(format!("flare {} has an invalid position or radius", f.index)));
            }
            if !(f.brightness >= 0.0 && f.brightness.is_finite()) {
                return Err(Error::invalid(format!("flare {} brightness must be non-negative", f.index)));
            }
        }
        let close_max = self.group_positions(FlareGroup::Close).fold(f64::MIN, f64::max);
        let far_min = self.group_positions(FlareGroup::Far).fold(f64::MAX, f64::min);
        if close_max >= far_min {
            return Err(Error::invalid(format!(
                "close flares must lie nearer the source than far flares ({close_max} >= {far_min})"
            )));
        }
        if let Some(g) = &self.glare {
            validate_glare_index(g.index)?;
            if !(g.radius > 0.0 && g.radius.is_finite() && g.brightness >= 0.0 && g.brightness.is_finite()) {
                return Err(Error::invalid("glare radius and brightness must be positive"));
            }
        }
        if self.degenerate_axis_angle.is_none() && is_degenerate(self.sun, dims) {
            return Err(Error::invalid("light source on the image center needs a flare axis angle"));
        }
        Ok(())
    }

    fn group_positions(&self, group: FlareGroup) -> impl Iterator<Item = f64> + '_ {
        self.flares.iter().filter(move |f| f.group == group).map(|f| f.position)
    }

    /// Pixel center of a flare at line coordinate `t`.
    pub fn flare_center(&self, t: f64, dims: (usize, usize)) -> [f64; 2] {
        let (cx, cy) = (dims.0 as f64 / 2.0, dims.1 as f64 / 2.0);
        match self.degenerate_axis_angle {
            Some(a) => {
                let s = DEGENERATE_AXIS_SCALE * dims.0 as f64 * (t - 1.0);
                [cx + s * a.cos(), cy + s * a.sin()]
            }
            None => [
                self.sun[0] + t * (cx - self.sun[0]),
                self.sun[1] + t * (cy - self.sun[1]),
            ],
        }
    }
}

fn splat(
    layer: &mut [[f64; 3]],
    dims: (usize, usize),
    center: [f64; 2],
    radius_px: f64,
    gain: f64,
    sample: impl Fn(f64, f64) -> [f64; 3],
) {
    let (w, h) = dims;
    let x0 = (center[0] - radius_px).floor().max(0.0);
    let y0 = (center[1] - radius_px).floor().max(0.0);
    let x1 = (center[0] + radius_px).ceil().min(w as f64 - 1.0);
    let y1 = (center[1] + radius_px).ceil().min(h as f64 - 1.0);
    if x0 > x1 || y0 > y1 {
        return;
    }
    let scale = 255.0 * gain;
    for y in y0 as usize..=y1 as usize {
        let uy = (y as f64 - center[1]) / radius_px;
        let row = &mut layer[y * w..(y + 1) * w];
        for x in x0 as usize..=x1 as usize {
            let ux = (x as f64 - center[0]) / radius_px;
            let c = sample(ux, uy);
            for k in 0..3 {
                row[x][k] += c[k] * scale;
            }
        }
    }
}

/// Straylight-only layer in image channel units, after the visibility floor.
/// `values` holds the strongest channel per pixel.
pub fn straylight_layer(params: &StraylightParams, dims: (usize, usize)) -> Result<Texture> {
    params.validate(dims)?;
    let (w, h) = dims;
    let mut layer = vec![[0.0f64; 3]; w * h];
    if let Some(g) = &params.glare {
        let index = g.index;
        splat(&mut layer, dims, params.sun, g.radius * w as f64, g.brightness * GLARE_GAIN, |x, y| {
            glare_sample(index, x, y)
        });
    }
    for f in &params.flares {
        let index = f.index;
        let center = params.flare_center(f.position, dims);
        splat(&mut layer, dims, center, f.radius * w as f64, f.brightness * FLARE_GAIN, |x, y| {
            flare_sample(index, x, y)
        });
    }
    let mut tex = Texture::zeros(w, h);
    for (c, v) in layer.iter_mut().zip(tex.values.iter_mut()) {
        let m = c[0].max(c[1]).max(c[2]);
        if m < VISIBILITY_FLOOR {
            *c = [0.0; 3];
        } else {
            *v = m;
        }
    }
    tex.rgb = Some(layer);
    Ok(tex)
}

/// Adds a straylight layer to `img` with per-channel saturation; intensity
/// follows the new RGB wherever the layer is non-zero.
pub fn composite_layer(img: &ImageRgbi, layer: &Texture) -> Result<ImageRgbi> {
    if img.dims() != (layer.width, layer.height) {
        return Err(Error::invalid("straylight layer and image sizes differ"));
    }
    let mut out = img.clone();
    let rgb = layer.rgb.as_ref().ok_or_else(|| Error::invalid("straylight layer has no color"))?;
    for (px, (c, &v)) in out.pixels_mut().iter_mut().zip(rgb.iter().zip(&layer.values)) {
        if v == 0.0 {
            continue;
        }
        for (ch, k) in [RED, GREEN, BLUE].into_iter().zip(0..3) {
            px[ch] = crate::raster::quantize(px[ch] as f64 + c[k]);
        }
        px[INTENSITY] = intensity_of([px[RED], px[GREEN], px[BLUE]]);
    }
    Ok(out)
}

/// Renders and composites `params`; returns the image and the layer.
pub fn apply_straylight(img: &ImageRgbi, params: &StraylightParams) -> Result<(ImageRgbi, Texture)> {
    let layer = straylight_layer(params, img.dims())?;
    let out = composite_layer(img, &layer)?;
    Ok((out, layer))
}

/// Samples straylight for `sun` and applies it.
pub fn inject_straylight(
    img: &ImageRgbi,
    sun: &SunPixel,
    ranges: &FaultRanges,
    rng: &mut SeededRng,
) -> Result<(ImageRgbi, Texture, StraylightParams)> {
    let params = sample_straylight(sun, img.dims(), ranges, None, None, rng)?;
    let (out, layer) = apply_straylight(img, &params)?;
    Ok((out, layer, params))
}

/// Pixels the layer touches at or above `tau`.
pub fn layer_footprint(layer: &Texture, tau: f64) -> Result<FaultMask> {
    FaultMask::from_bits(layer.width, layer.height, layer.values.iter().map(|&v| v >= tau).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::camera::CameraModel;

    fn one_flare(t: f64, sun: [f64; 2]) -> StraylightParams {
        StraylightParams {
            sun,
            count: 1,
            flares: vec![FlarePlacement {
                index: 1,
                group: FlareGroup::Close,
                position: t,
                radius: 0.05,
                brightness: 2.0,
            }],
            glare: None,
            degenerate_axis_angle: None,
        }
    }

    #[test]
    fn line_frame_endpoints() {
        let p = one_flare(1.0, [100.0, 200.0]);
        assert_eq!(p.flare_center(1.0, (1024, 1024)), [512.0, 512.0]);
        assert_eq!(p.flare_center(0.0, (1024, 1024)), [100.0, 200.0]);
    }

    #[test]
    fn behind_is_rejected() {
        let sun = SunPixel {
            u: 0.0,
            v: 0.0,
            in_fov: false,
            behind: true,
        };
        let r = sample_straylight(&sun, (64, 64), &FaultRanges::default(), None, None, &mut SeededRng::new(1));
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn peak_at_flare_center() {
        let p = one_flare(1.0, [10.0, 10.0]);
        let layer = straylight_layer(&p, (128, 128)).unwrap();
        let peak = layer.get(64, 64);
        assert!((peak - 255.0 * 2.0 * FLARE_GAIN).abs() < 1e-9);
        assert_eq!(layer.get(0, 127), 0.0);
    }

    #[test]
    fn sampled_groups_are_ordered() {
        let cam = CameraModel::standard();
        let sun = SunPixel::ahead(300.0, 700.0, &cam);
        let mut rng = SeededRng::new(77);
        for _ in 0..500 {
            let p = sample_straylight(&sun, (1024, 1024), &FaultRanges::default(), None, None, &mut rng).unwrap();
            assert!((1..=10).contains(&p.count));
            p.validate((1024, 1024)).unwrap();
        }
    }

    #[test]
    fn degenerate_center_gets_axis() {
        let cam = CameraModel::standard();
        let sun = SunPixel::ahead(512.0, 512.0, &cam);
        let p = sample_straylight(&sun, (1024, 1024), &FaultRanges::default(), None, Some(false), &mut SeededRng::new(5))
            .unwrap();
        assert!(p.degenerate_axis_angle.is_some());
    }

    #[test]
    fn composite_only_brightens() {
        let img = ImageRgbi::new(64, 64, [30, 20, 10, 20]).unwrap();
        let p = one_flare(0.5, [16.0, 16.0]);
        let (out, layer) = apply_straylight(&img, &p).unwrap();
        let fp = layer_footprint(&layer, VISIBILITY_FLOOR).unwrap();
        assert!(!fp.is_empty());
        for (x, y) in fp.iter_set() {
            let (a, b) = (img.get(x, y), out.get(x, y));
            assert!((0..3).all(|k| b[k] >= a[k]));
            assert!((0..3).any(|k| b[k] >= a[k] + 2));
        }
        assert!(img.diff_mask(&out).unwrap().is_subset_of(&fp));
    }
}
