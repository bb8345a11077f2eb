//! PNG encoding: images as RGBA8 with intensity in the alpha plane, masks as
//! 8-bit grayscale with values {0, 255}.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use image::codecs::png::{CompressionType, FilterType, PngEncoder};
use image::{ColorType, DynamicImage, ImageEncoder};

use crate::error::{Error, Result};
use crate::raster::{intensity_of, FaultMask, ImageRgbi};

fn encode(path: &Path, bytes: &[u8], width: usize, height: usize, color: ColorType) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let encoder = PngEncoder::new_with_quality(
        BufWriter::new(file),
        CompressionType::Fast,
        FilterType::Sub,
    );
    encoder
        .write_image(bytes, width as u32, height as u32, color.into())
        .map_err(|source| Error::Image {
            path: path.to_path_buf(),
            source,
        })
}

pub fn write_image(img: &ImageRgbi, path: &Path) -> Result<()> {
    let bytes: Vec<u8> = img.pixels().iter().flatten().copied().collect();
    encode(path, &bytes, img.width(), img.height(), ColorType::Rgba8)
}

/// Reads an 8-bit PNG. RGBA is taken as RGBI; RGB and grayscale inputs get
/// intensity from the RGB mean.
pub fn read_image(path: &Path) -> Result<ImageRgbi> {
    let dynamic = image::open(path).map_err(|source| match source {
        image::ImageError::IoError(e) => Error::io(path, e),
        source => Error::Image {
            path: path.to_path_buf(),
            source,
        },
    })?;
    let (w, h) = (dynamic.width() as usize, dynamic.height() as usize);
    let pixels = match dynamic {
        DynamicImage::ImageRgba8(buf) => buf.pixels().map(|p| p.0).collect(),
        DynamicImage::ImageRgb8(buf) => buf
            .pixels()
            .map(|p| [p[0], p[1], p[2], intensity_of(p.0)])
            .collect(),
        DynamicImage::ImageLuma8(buf) => buf.pixels().map(|p| [p[0]; 4]).collect(),
        other => {
            return Err(Error::invalid(format!(
                "{}: unsupported pixel format {:?}, expected 8-bit gray, RGB or RGBA",
                path.display(),
                other.color()
            )))
        }
    };
    ImageRgbi::from_pixels(w, h, pixels)
}

pub fn write_mask(mask: &FaultMask, path: &Path) -> Result<()> {
    let bytes: Vec<u8> = mask.bits().iter().map(|&b| if b { 255 } else { 0 }).collect();
    encode(path, &bytes, mask.width(), mask.height(), ColorType::L8)
}

/// Reads a mask PNG; any non-zero gray level counts as set.
pub fn read_mask(path: &Path) -> Result<FaultMask> {
    let img = image::open(path)
        .map_err(|source| Error::Image {
            path: path.to_path_buf(),
            source,
        })?
        .into_luma8();
    let (w, h) = (img.width() as usize, img.height() as usize);
    FaultMask::from_bits(w, h, img.pixels().map(|p| p[0] != 0).collect())
}

pub fn write_gray(values: &[u8], width: usize, height: usize, path: &Path) -> Result<()> {
    encode(path, values, width, height, ColorType::L8)
}

pub fn write_rgba(values: &[[u8; 4]], width: usize, height: usize, path: &Path) -> Result<()> {
    let bytes: Vec<u8> = values.iter().flatten().copied().collect();
    encode(path, &bytes, width, height, ColorType::Rgba8)
}
