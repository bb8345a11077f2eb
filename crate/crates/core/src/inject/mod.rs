//! Fault injectors, the injection matrix and the composition pipeline.

pub mod blur;
pub mod dust;
pub mod lines;
pub mod matrix;
pub mod params;
pub mod pipeline;
pub mod pixels;
pub mod straylight;
pub mod vignetting;

pub use blur::{apply_blur, inject_blur};
pub use dust::{apply_dust, inject_dust, sample_dust};
pub use lines::{apply_broken_lines, inject_broken_lines, sample_broken_lines};
pub use matrix::{build_injection_matrix, straylight_count, InjectionMatrix, MatrixOptions};
pub use params::*;
pub use pipeline::{apply_faults, apply_pipeline, sample_fault_params, FaultySample, PipelineConfig};
pub use pixels::{apply_broken_pixels, inject_broken_pixels, sample_broken_pixels};
pub use straylight::{apply_straylight, inject_straylight, sample_straylight, straylight_layer};
pub use vignetting::{apply_vignetting, inject_vignetting};
