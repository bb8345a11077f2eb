//! Textures injected onto images: dust grains, straylight primitives, the
//! vignette field and blur kernels.

pub mod flare;
pub mod grain;
pub mod kernel;
pub mod vignette;

pub use flare::{flare_primitive, glare_primitive, FlareGroup, FLARE_COUNT, GLARE_COUNT};
pub use grain::{dust_grain, GrainParams};
pub use kernel::{gaussian_kernel, GaussianKernel};
pub use vignette::{cos4_factor, vignette_field};

/// A real-valued raster, pre-quantization. `values` holds the scalar field
/// (for colored textures, the largest channel); `rgb` the per-pixel color
/// when the texture has one.
#[derive(Debug, Clone, PartialEq)]
pub struct Texture {
    pub width: usize,
    pub height: usize,
    pub values: Vec<f64>,
    pub rgb: Option<Vec<[f64; 3]>>,
}

impl Texture {
    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            values: vec![0.0; width * height],
            rgb: None,
        }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Values rounded and clamped to 8 bits.
    pub fn to_gray8(&self) -> Vec<u8> {
        self.values.iter().map(|&v| crate::raster::quantize(v)).collect()
    }

    /// RGBA8 rendering: color where present, alpha carries `values`.
    pub fn to_rgba8(&self) -> Vec<[u8; 4]> {
        let q = crate::raster::quantize;
        match &self.rgb {
            Some(rgb) => rgb
                .iter()
                .zip(&self.values)
                .map(|(c, &v)| [q(c[0]), q(c[1]), q(c[2]), q(v)])
                .collect(),
            None => self.values.iter().map(|&v| [q(v); 4]).collect(),
        }
    }
}
