//! Procedural backgrounds: a dark sky over value-noise terrain, with a Sun disk.
//!
//! Stand-in for an external renderer. Any renderer can be plugged in through
//! [`BackgroundProvider`]; [`ImportedBackgrounds`] reads pre-rendered PNGs.

use std::path::{Path, PathBuf};

use nalgebra::Vector3;

use super::frames::SunPixel;
use super::sampling::DatasetVariables;
use crate::camera::CameraModel;
use crate::error::{Error, Result};
use crate::raster::{quantize, ImageRgbi, Pixel};
use crate::rng::{splitmix64, SeededRng};

/// Sun disk radius as a fraction of the image width.
pub const SUN_DISK_RADIUS_FRACTION: f64 = 0.015;

/// Procedural content never exceeds this, so only the Sun disk reaches 255.
pub const BACKGROUND_CEILING: f64 = 200.0;

const SKY_HORIZON: [f64; 3] = [34.0, 36.0, 44.0];
const SKY_ZENITH: [f64; 3] = [3.0, 3.0, 6.0];
const TERRAIN_BASE: [f64; 3] = [118.0, 104.0, 88.0];
const CAMERA_HEIGHT: f64 = 1.0;
const NOISE_SCALE: f64 = 0.35;
const FOG_DISTANCE: f64 = 40.0;

/// Supplies the clean image a sample starts from.
pub trait BackgroundProvider: Sync {
    fn background(
        &self,
        sample_index: usize,
        vars: &DatasetVariables,
        cam: &CameraModel,
        rng: &mut SeededRng,
    ) -> Result<(ImageRgbi, SunPixel)>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ProceduralBackground;

impl BackgroundProvider for ProceduralBackground {
    fn background(
        &self,
        _sample_index: usize,
        vars: &DatasetVariables,
        cam: &CameraModel,
        rng: &mut SeededRng,
    ) -> Result<(ImageRgbi, SunPixel)> {
        Ok(render_background(vars, cam, rng))
    }
}

fn lattice(seed: u64, ix: i64, iy: i64) -> f64 {
    let h = splitmix64(seed ^ splitmix64((ix as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (iy as u64)));
    (h >> 11) as f64 / (1u64 << 53) as f64
}

fn smooth(t: f64) -> f64 {
    t * t * (3.0 - 2.0 * t)
}

fn value_noise(seed: u64, x: f64, y: f64) -> f64 {
    let (fx, fy) = (x.floor(), y.floor());
    let (ix, iy) = (fx as i64, fy as i64);
    let (tx, ty) = (smooth(x - fx), smooth(y - fy));
    let a = lattice(seed, ix, iy);
    let b = lattice(seed, ix + 1, iy);
    let c = lattice(seed, ix, iy + 1);
    let d = lattice(seed, ix + 1, iy + 1);
    let top = a + (b - a) * tx;
    let bottom = c + (d - c) * tx;
    top + (bottom - top) * ty
}

/// Four-octave fractal value noise in `[0, 1]`.
fn fbm(seed: u64, x: f64, y: f64) -> f64 {
    let mut sum = 0.0;
    let mut amp = 0.5;
    let mut freq = 1.0;
    let mut norm = 0.0;
    for octave in 0..4u64 {
        sum += amp * value_noise(seed.wrapping_add(octave), x * freq, y * freq);
        norm += amp;
        amp *= 0.5;
        freq *= 2.0;
    }
    sum / norm
}

fn lerp3(a: [f64; 3], b: [f64; 3], t: f64) -> [f64; 3] {
    [
        a[0] + (b[0] - a[0]) * t,
        a[1] + (b[1] - a[1]) * t,
        a[2] + (b[2] - a[2]) * t,
    ]
}

fn to_pixel(rgb: [f64; 3]) -> Pixel {
    let c = |v: f64| quantize(v.min(BACKGROUND_CEILING));
    let (r, g, b) = (c(rgb[0]), c(rgb[1]), c(rgb[2]));
    [r, g, b, crate::raster::intensity_of([r, g, b])]
}

/// Renders the procedural scene for `vars` and returns it with the Sun pixel.
///
/// Pure in `(vars, cam, rng seed)`. The Sun disk is drawn only when its
/// center projects inside the raster.
pub fn render_background(
    vars: &DatasetVariables,
    cam: &CameraModel,
    rng: &mut SeededRng,
) -> (ImageRgbi, SunPixel) {
    let position_hash = vars
        .position
        .iter()
        .fold(0u64, |h, p| splitmix64(h ^ p.to_bits()));
    let noise_seed = rng.next_u64() ^ position_hash;

    let camera_to_local = vars.local_to_camera().inverse();
    let m = *camera_to_local.matrix();
    let (cx, cy) = cam.center();
    let f = cam.focal_px();
    let sun_light = 0.55 + 0.45 * vars.sun_elevation.sin().max(0.0);

    let (w, h) = (cam.width(), cam.height());
    let mut img = ImageRgbi::new(w, h, [0; 4]).expect("camera raster is non-empty");
    for (y, row) in img.rows_mut().enumerate() {
        for (x, px) in row.iter_mut().enumerate() {
            let ray_cam = Vector3::new((x as f64 - cx) / f, (y as f64 - cy) / f, 1.0).normalize();
            let ray = m * ray_cam;
            let rgb = if ray.z > 1e-6 {
                // below the horizon: intersect the ground plane
                let t = CAMERA_HEIGHT / ray.z;
                let (gx, gy) = (ray.x * t, ray.y * t);
                let n = fbm(noise_seed, gx * NOISE_SCALE, gy * NOISE_SCALE);
                let shade = sun_light * (0.45 + 0.55 * n);
                let ground = TERRAIN_BASE.map(|c| c * shade);
                let fog = 1.0 - (-t / FOG_DISTANCE).exp();
                lerp3(ground, SKY_HORIZON, fog)
            } else {
                let elevation = (-ray.z).clamp(0.0, 1.0).asin();
                lerp3(SKY_HORIZON, SKY_ZENITH, (elevation / 0.6).min(1.0).sqrt())
            };
            *px = to_pixel(rgb);
        }
    }

    let sun = vars.sun_pixel(cam);
    if sun.in_fov {
        draw_sun_disk(&mut img, &sun);
    }
    (img, sun)
}

/// Hard-edged saturated disk centred on the Sun pixel.
pub fn draw_sun_disk(img: &mut ImageRgbi, sun: &SunPixel) {
    let r = SUN_DISK_RADIUS_FRACTION * img.width() as f64;
    let x0 = (sun.u - r).floor().max(0.0) as i64;
    let x1 = (sun.u + r).ceil() as i64;
    let y0 = (sun.v - r).floor().max(0.0) as i64;
    let y1 = (sun.v + r).ceil() as i64;
    for y in y0..=y1 {
        for x in x0..=x1 {
            if !img.contains(x, y) {
                continue;
            }
            let (dx, dy) = (x as f64 - sun.u, y as f64 - sun.v);
            if dx * dx + dy * dy <= r * r {
                img.set(x as usize, y as usize, [255; 4]);
            }
        }
    }
}

/// Backgrounds read from PNG files with a `<stem>.sun.txt` sidecar holding
/// `u v` (Sun column and row in pixels). Sample `i` uses file `i % len`.
#[derive(Debug, Clone)]
pub struct ImportedBackgrounds {
    entries: Vec<(PathBuf, Option<(f64, f64)>)>,
}

impl ImportedBackgrounds {
    pub fn new(paths: Vec<PathBuf>) -> Result<Self> {
        if paths.is_empty() {
            return Err(Error::invalid("background import list is empty"));
        }
        let entries = paths
            .into_iter()
            .map(|p| {
                let sun = read_sun_sidecar(&sidecar_path(&p))?;
                Ok((p, sun))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn sidecar_path(image: &Path) -> PathBuf {
    let stem = image
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    image.with_file_name(format!("{stem}.sun.txt"))
}

/// Parses `u v` or `u,v`. A missing file yields `None`.
pub fn read_sun_sidecar(path: &Path) -> Result<Option<(f64, f64)>> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(Error::io(path, e)),
    };
    parse_sun_coords(text.trim()).map(Some).map_err(|_| {
        Error::invalid(format!(
            "{}: expected `u v` Sun pixel coordinates, got {:?}",
            path.display(),
            text.trim()
        ))
    })
}

/// Parses `u,v` or `u v`.
pub fn parse_sun_coords(s: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = s
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|p| !p.is_empty())
        .collect();
    let parse = |p: &str| {
        p.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::invalid(format!("not a finite number: {p:?}")))
    };
    match parts.as_slice() {
        [u, v] => Ok((parse(u)?, parse(v)?)),
        _ => Err(Error::invalid(format!("expected two coordinates, got {s:?}"))),
    }
}

impl BackgroundProvider for ImportedBackgrounds {
    fn background(
        &self,
        sample_index: usize,
        _vars: &DatasetVariables,
        cam: &CameraModel,
        _rng: &mut SeededRng,
    ) -> Result<(ImageRgbi, SunPixel)> {
        let (path, sun) = &self.entries[sample_index % self.entries.len()];
        let img = crate::io::read_image(path)?;
        if img.dims() != (cam.width(), cam.height()) {
            return Err(Error::invalid(format!(
                "{} is {}x{}, camera expects {}x{}",
                path.display(),
                img.width(),
                img.height(),
                cam.width(),
                cam.height()
            )));
        }
        let sun = match sun {
            Some((u, v)) => SunPixel::ahead(*u, *v, cam),
            None => SunPixel {
                u: f64::MAX,
                v: f64::MAX,
                in_fov: false,
                behind: true,
            },
        };
        Ok((img, sun))
    }
}
