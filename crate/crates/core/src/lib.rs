//! Deterministic camera fault injection for vision-based navigation datasets.
//!
//! A clean background (procedural or imported) passes through six injectors
//! (straylight, dust, vignetting, blur, broken pixels, broken lines) and
//! comes out with one binary mask per fault class and a JSON manifest that
//! regenerates it bit for bit.

pub mod camera;
pub mod cli;
pub mod dataset;
pub mod error;
pub mod inject;
pub mod io;
pub mod labels;
pub mod raster;
pub mod rng;
pub mod scene;
pub mod textures;

pub use camera::CameraModel;
pub use error::{Error, Result};
pub use raster::{FaultMask, ImageRgbi};
pub use rng::SeededRng;
