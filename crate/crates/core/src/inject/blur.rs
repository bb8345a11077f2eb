//! Optics degradation: separable Gaussian blur with edge replication.

use super::params::BlurParams;
use crate::error::Result;
use crate::raster::{quantize, ImageRgbi};
use crate::textures::{gaussian_kernel, GaussianKernel};

fn convolve_rows(src: &[[f64; 4]], w: usize, h: usize, k: &GaussianKernel) -> Vec<[f64; 4]> {
    let r = k.radius() as i64;
    let taps = k.taps();
    let mut dst = vec![[0.0; 4]; w * h];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        for x in 0..w {
            let mut acc = [0.0; 4];
            for (i, &t) in taps.iter().enumerate() {
                let sx = (x as i64 + i as i64 - r).clamp(0, w as i64 - 1) as usize;
                for c in 0..4 {
                    acc[c] += t * row[sx][c];
                }
            }
            dst[y * w + x] = acc;
        }
    }
    dst
}

fn convolve_cols(src: &[[f64; 4]], w: usize, h: usize, k: &GaussianKernel) -> Vec<[f64; 4]> {
    let r = k.radius() as i64;
    let taps = k.taps();
    let mut dst = vec![[0.0; 4]; w * h];
    for y in 0..h {
        for (i, &t) in taps.iter().enumerate() {
            let sy = (y as i64 + i as i64 - r).clamp(0, h as i64 - 1) as usize;
            let src_row = &src[sy * w..(sy + 1) * w];
            let dst_row = &mut dst[y * w..(y + 1) * w];
            for (d, s) in dst_row.iter_mut().zip(src_row) {
                for c in 0..4 {
                    d[c] += t * s[c];
                }
            }
        }
    }
    dst
}

/// Every channel convolved with the kernel, computed in `f64` and rounded once.
pub fn apply_blur(img: &ImageRgbi, params: &BlurParams) -> Result<ImageRgbi> {
    let k = gaussian_kernel(params.size)?;
    let (w, h) = img.dims();
    let src: Vec<[f64; 4]> = img.pixels().iter().map(|p| p.map(f64::from)).collect();
    let tmp = convolve_rows(&src, w, h, &k);
    let out = convolve_cols(&tmp, w, h, &k);
    ImageRgbi::from_pixels(w, h, out.into_iter().map(|p| p.map(quantize)).collect())
}

pub fn inject_blur(img: &ImageRgbi, size: usize) -> Result<ImageRgbi> {
    apply_blur(img, &BlurParams { size })
}
