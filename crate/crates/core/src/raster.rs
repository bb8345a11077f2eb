//! Four-plane 8-bit rasters and per-fault binary masks.

use crate::error::{Error, Result};

/// Channel order inside a pixel quadruple.
pub const RED: usize = 0;
pub const GREEN: usize = 1;
pub const BLUE: usize = 2;
pub const INTENSITY: usize = 3;

pub type Pixel = [u8; 4];

/// `value + delta`, clamped to `[0, 255]`.
#[inline]
pub fn saturating_add(value: u8, delta: i32) -> u8 {
    (value as i32 + delta).clamp(0, 255) as u8
}

/// Rounds and clamps a real channel value into `[0, 255]`.
#[inline]
pub fn quantize(value: f64) -> u8 {
    if value.is_nan() {
        0
    } else {
        value.round().clamp(0.0, 255.0) as u8
    }
}

/// Intensity kept in step with RGB: `round((r + g + b) / 3)`.
#[inline]
pub fn intensity_of(rgb: [u8; 3]) -> u8 {
    let sum = rgb[0] as u32 + rgb[1] as u32 + rgb[2] as u32;
    // round-half-up of sum/3 in integers
    ((2 * sum + 3) / 6) as u8
}

/// Sets intensity to `new_i` and rescales RGB by `new_i / old_i`.
///
/// A pixel with zero intensity has no hue to preserve; it becomes gray at `new_i`.
#[inline]
pub fn with_intensity(px: Pixel, new_i: u8) -> Pixel {
    let old_i = px[INTENSITY];
    if new_i == old_i {
        return px;
    }
    if old_i == 0 {
        return [new_i, new_i, new_i, new_i];
    }
    let ratio = new_i as f64 / old_i as f64;
    [
        quantize(px[RED] as f64 * ratio),
        quantize(px[GREEN] as f64 * ratio),
        quantize(px[BLUE] as f64 * ratio),
        new_i,
    ]
}

/// RGBI raster, row-major, interleaved.
#[derive(Clone, PartialEq, Eq)]
pub struct ImageRgbi {
    width: usize,
    height: usize,
    data: Vec<Pixel>,
}

impl std::fmt::Debug for ImageRgbi {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ImageRgbi")
            .field("width", &self.width)
            .field("height", &self.height)
            .finish_non_exhaustive()
    }
}

impl ImageRgbi {
    pub fn new(width: usize, height: usize, fill: Pixel) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        Ok(Self {
            width,
            height,
            data: vec![fill; width * height],
        })
    }

    pub fn from_pixels(width: usize, height: usize, data: Vec<Pixel>) -> Result<Self> {
        if width == 0 || height == 0 || data.len() != width * height {
            return Err(Error::invalid(format!(
                "pixel buffer of length {} does not match {width}x{height}",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Pixel {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, px: Pixel) {
        self.data[y * self.width + x] = px;
    }

    #[inline]
    pub fn contains(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height
    }

    pub fn pixels(&self) -> &[Pixel] {
        &self.data
    }

    pub fn pixels_mut(&mut self) -> &mut [Pixel] {
        &mut self.data
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, Pixel> {
        self.data.chunks_exact(self.width)
    }

    pub fn rows_mut(&mut self) -> std::slice::ChunksExactMut<'_, Pixel> {
        self.data.chunks_exact_mut(self.width)
    }

    /// Overwrites intensity with the rounded mean of RGB everywhere.
    pub fn sync_intensity(&mut self) {
        for px in &mut self.data {
            px[INTENSITY] = intensity_of([px[RED], px[GREEN], px[BLUE]]);
        }
    }

    /// Pixels where any channel differs.
    pub fn diff_mask(&self, other: &ImageRgbi) -> Result<FaultMask> {
        self.diff_mask_at_least(other, 1)
    }

    /// Pixels where the largest per-channel absolute difference is `>= tau`.
    pub fn diff_mask_at_least(&self, other: &ImageRgbi, tau: u8) -> Result<FaultMask> {
        if self.dims() != other.dims() {
            return Err(Error::invalid(format!(
                "dimension mismatch: {:?} vs {:?}",
                self.dims(),
                other.dims()
            )));
        }
        let bits = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| {
                let d = (0..4).map(|c| a[c].abs_diff(b[c])).max().unwrap_or(0);
                d >= tau.max(1)
            })
            .collect();
        Ok(FaultMask {
            width: self.width,
            height: self.height,
            bits,
        })
    }
}

/// One boolean per pixel, aligned with the image it labels.
#[derive(Clone, PartialEq, Eq)]
pub struct FaultMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl std::fmt::Debug for FaultMask {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FaultMask")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("set", &self.count())
            .finish()
    }
}

impl FaultMask {
    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn full(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![true; width * height],
        }
    }

    pub fn from_bits(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != width * height {
            return Err(Error::invalid(format!(
                "mask of length {} does not match {width}x{height}",
                bits.len()
            )));
        }
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize) {
        self.bits[y * self.width + x] = true;
    }

    /// Sets `(x, y)` if it lies inside the raster.
    #[inline]
    pub fn set_checked(&mut self, x: i64, y: i64) {
        if x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height {
            self.set(x as usize, y as usize);
        }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    /// True if every set pixel of `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &FaultMask) -> bool {
        self.dims() == other.dims()
            && self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }

    pub fn union_with(&mut self, other: &FaultMask) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::invalid(format!(
                "mask dimension mismatch: {:?} vs {:?}",
                self.dims(),
                other.dims()
            )));
        }
        for (a, &b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
        Ok(())
    }

    pub fn iter_set(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.width;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| (i % w, i / w))
    }
}
