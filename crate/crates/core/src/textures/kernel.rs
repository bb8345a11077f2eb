use crate::error::{Error, Result};

pub const MIN_KERNEL_SIZE: usize = 3;
pub const MAX_KERNEL_SIZE: usize = 17;

/// Separable, normalized Gaussian filter with `sigma = size / 6`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianKernel {
    size: usize,
    sigma: f64,
    taps: Vec<f64>,
}

impl GaussianKernel {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// 1-D taps; the 2-D kernel is their outer product.
    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn radius(&self) -> usize {
        self.size / 2
    }

    pub fn weight(&self, x: usize, y: usize) -> f64 {
        self.taps[x] * self.taps[y]
    }

    /// Row-major `size x size` matrix.
    pub fn to_matrix(&self) -> Vec<f64> {
        let mut m = Vec::with_capacity(self.size * self.size);
        for y in 0..self.size {
            for x in 0..self.size {
                m.push(self.weight(x, y));
            }
        }
        m
    }
}

pub fn validate_kernel_size(size: usize) -> Result<()> {
    if size % 2 == 0 || !(MIN_KERNEL_SIZE..=MAX_KERNEL_SIZE).contains(&size) {
        return Err(Error::invalid(format!(
            "blur kernel size must be odd and within [{MIN_KERNEL_SIZE}, {MAX_KERNEL_SIZE}], got {size}"
        )));
    }
    Ok(())
}

pub fn gaussian_kernel(size: usize) -> Result<GaussianKernel> {
    validate_kernel_size(size)?;
    let sigma = size as f64 / 6.0;
    let r = (size / 2) as i64;
    let raw: Vec<f64> = (-r..=r)
        .map(|i| (-((i * i) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = raw.iter().sum();
    Ok(GaussianKernel {
        size,
        sigma,
        taps: raw.into_iter().map(|v| v / total).collect(),
    })
}
