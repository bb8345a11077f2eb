//! Composition of all injectors on one background.
//!
//! Stage order: straylight, dust, vignetting, blur, broken pixels, broken
//! lines. The flare-free render repeats stages 2-6 with the same parameters
//! on the background without straylight.

use serde::{Deserialize, Serialize};

use super::blur::apply_blur;
use super::dust::{apply_dust, sample_dust};
use super::lines::{apply_broken_lines, sample_broken_lines};
use super::params::{
    BlurParams, FaultClass, FaultFlags, FaultParams, FaultRanges, LineDirection, ParamOverrides, SensorArchitecture,
    VignettingParams,
};
use super::pixels::{apply_broken_pixels, sample_broken_pixels};
use super::straylight::{apply_straylight, sample_straylight};
use super::vignetting::apply_vignetting;
use crate::camera::CameraModel;
use crate::error::{Error, Result};
use crate::raster::{FaultMask, ImageRgbi};
use crate::rng::{SeededRng, Stream};
use crate::scene::SunPixel;
use crate::textures::Texture;

/// Default straylight subtraction threshold in intensity levels.
pub const DEFAULT_TAU: u8 = 2;

fn default_tau() -> u8 {
    DEFAULT_TAU
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub camera: CameraModel,
    #[serde(default)]
    pub ranges: FaultRanges,
    #[serde(default)]
    pub overrides: ParamOverrides,
    #[serde(default = "default_tau")]
    pub tau: u8,
}

impl PipelineConfig {
    pub fn new(camera: CameraModel) -> Self {
        Self {
            camera,
            ranges: FaultRanges::default(),
            overrides: ParamOverrides::default(),
            tau: DEFAULT_TAU,
        }
    }
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self::new(CameraModel::standard())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FaultySample {
    pub clean: ImageRgbi,
    pub faulty: ImageRgbi,
    /// Present when straylight was injected.
    pub flare_free: Option<ImageRgbi>,
    /// Indexed by [`FaultClass::row`].
    pub masks: Vec<FaultMask>,
    pub params: FaultParams,
    pub straylight_layer: Option<Texture>,
}

impl FaultySample {
    pub fn mask(&self, class: FaultClass) -> &FaultMask {
        &self.masks[class.row()]
    }

    pub fn flags(&self) -> FaultFlags {
        self.params.flags()
    }
}

fn odd_in(rng: &mut SeededRng, min: usize, max: usize) -> usize {
    let lo = min | 1;
    if lo > max {
        return lo;
    }
    lo + 2 * rng.below(((max - lo) / 2 + 1) as u64) as usize
}

/// Draws every enabled class's parameters. Each class reads its own stream of
/// `rng`, so enabling or overriding one class never shifts another's draws.
pub fn sample_fault_params(
    flags: &FaultFlags,
    sun: &SunPixel,
    cfg: &PipelineConfig,
    rng: &SeededRng,
) -> Result<FaultParams> {
    let dims = (cfg.camera.width(), cfg.camera.height());
    let r = &cfg.ranges;
    let o = &cfg.overrides;

    let mut sensor_rng = rng.stream(Stream::Sensor);
    let sensor = *sensor_rng.choose(&SensorArchitecture::ALL);
    let direction = *sensor_rng.choose(&LineDirection::ALL);
    let sensor = o.sensor.unwrap_or(sensor);
    let direction = o.direction.unwrap_or(direction);

    let mut params = FaultParams::default();

    if flags.straylight {
        let mut s = rng.stream(Stream::Straylight);
        params.straylight = Some(sample_straylight(sun, dims, r, o.flares.as_deref(), o.glare, &mut s)?);
    }
    if flags.dust {
        let mut s = rng.stream(Stream::Dust);
        let drawn = s.int_inclusive(r.dust_grains.min as i64, r.dust_grains.max as i64) as usize;
        params.dust = Some(sample_dust(o.dust_grains.unwrap_or(drawn), dims, r, &mut s));
    }
    if flags.vignetting {
        let mut s = rng.stream(Stream::Vignetting);
        let drawn = s.int_inclusive(r.vignetting_e0.min as i64, r.vignetting_e0.max as i64) as u8;
        params.vignetting = Some(VignettingParams {
            e0: o.vignetting_e0.unwrap_or(drawn),
        });
    }
    if flags.optics_degradation {
        let mut s = rng.stream(Stream::Blur);
        let drawn = odd_in(&mut s, r.blur_size.min, r.blur_size.max);
        params.optics_degradation = Some(BlurParams {
            size: o.blur_size.unwrap_or(drawn),
        });
    }
    if flags.broken_pixels {
        let mut s = rng.stream(Stream::BrokenPixels);
        let drawn = s.int_inclusive(r.broken_pixels.min as i64, r.broken_pixels.max as i64) as usize;
        let count = o.broken_pixels.unwrap_or(drawn);
        params.broken_pixels = Some(sample_broken_pixels(count, sensor, direction, dims, r, &mut s)?);
    }
    if flags.broken_lines {
        let mut s = rng.stream(Stream::BrokenLines);
        let drawn = s.int_inclusive(r.broken_lines.min as i64, r.broken_lines.max as i64) as usize;
        let count = o.broken_lines.unwrap_or(drawn);
        params.broken_lines = Some(sample_broken_lines(count, o.white_lines, sensor, direction, dims, &mut s)?);
    }
    Ok(params)
}

struct PostStages {
    image: ImageRgbi,
    dust: FaultMask,
    vignetting: FaultMask,
    blur: FaultMask,
    pixels: FaultMask,
    lines: FaultMask,
}

fn post_straylight(img: &ImageRgbi, p: &FaultParams, cfg: &PipelineConfig) -> Result<PostStages> {
    let (w, h) = img.dims();
    let mut out = PostStages {
        image: img.clone(),
        dust: FaultMask::empty(w, h),
        vignetting: FaultMask::empty(w, h),
        blur: FaultMask::empty(w, h),
        pixels: FaultMask::empty(w, h),
        lines: FaultMask::empty(w, h),
    };
    if let Some(d) = &p.dust {
        (out.image, out.dust) = apply_dust(&out.image, d)?;
    }
    if let Some(v) = &p.vignetting {
        (out.image, out.vignetting) = apply_vignetting(&out.image, v, &cfg.camera)?;
    }
    if let Some(b) = &p.optics_degradation {
        out.image = apply_blur(&out.image, b)?;
        out.blur = FaultMask::full(w, h);
    }
    if let Some(bp) = &p.broken_pixels {
        (out.image, out.pixels) = apply_broken_pixels(&out.image, bp, &cfg.ranges)?;
    }
    if let Some(bl) = &p.broken_lines {
        (out.image, out.lines) = apply_broken_lines(&out.image, bl)?;
    }
    Ok(out)
}

/// Applies realized parameters to `clean`. Deterministic: no randomness.
pub fn apply_faults(clean: &ImageRgbi, params: &FaultParams, cfg: &PipelineConfig) -> Result<FaultySample> {
    if clean.dims() != (cfg.camera.width(), cfg.camera.height()) {
        return Err(Error::invalid(format!(
            "background is {}x{} but the camera raster is {}x{}",
            clean.width(),
            clean.height(),
            cfg.camera.width(),
            cfg.camera.height()
        )));
    }
    let (w, h) = clean.dims();
    let (flared, layer) = match &params.straylight {
        Some(s) => {
            let (img, layer) = apply_straylight(clean, s)?;
            (img, Some(layer))
        }
        None => (clean.clone(), None),
    };
    let post = post_straylight(&flared, params, cfg)?;
    let (flare_free, straylight_mask) = if layer.is_some() {
        let free = post_straylight(clean, params, cfg)?.image;
        let mask = post.image.diff_mask_at_least(&free, cfg.tau)?;
        (Some(free), mask)
    } else {
        (None, FaultMask::empty(w, h))
    };
    let mut masks = vec![FaultMask::empty(w, h); FaultClass::COUNT];
    masks[FaultClass::DustOnOptics.row()] = post.dust;
    masks[FaultClass::BrokenPixels.row()] = post.pixels;
    masks[FaultClass::BrokenLines.row()] = post.lines;
    masks[FaultClass::Vignetting.row()] = post.vignetting;
    masks[FaultClass::OpticsDegradation.row()] = post.blur;
    masks[FaultClass::Straylight.row()] = straylight_mask;
    Ok(FaultySample {
        clean: clean.clone(),
        faulty: post.image,
        flare_free,
        masks,
        params: params.clone(),
        straylight_layer: layer,
    })
}

/// Samples parameters for `flags` from `rng` and applies them.
pub fn apply_pipeline(
    background: &ImageRgbi,
    sun: &SunPixel,
    flags: &FaultFlags,
    cfg: &PipelineConfig,
    rng: &SeededRng,
) -> Result<FaultySample> {
    if flags.straylight && sun.behind {
        return Err(Error::Precondition(
            "straylight requested but the light source is behind the camera".into(),
        ));
    }
    let params = sample_fault_params(flags, sun, cfg, rng)?;
    apply_faults(background, &params, cfg)
}
