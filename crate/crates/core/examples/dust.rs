//! Dust grains on a flat gray frame; writes the image and its mask.
//!
//! cargo run --example dust -- [out_dir]

use faultsim::inject::{inject_dust, FaultRanges};
use faultsim::io::{write_image, write_mask};
use faultsim::{ImageRgbi, SeededRng};

fn main() -> faultsim::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "out_dust".into());
    std::fs::create_dir_all(&out).map_err(|e| faultsim::Error::io(&out, e))?;
    let clean = ImageRgbi::new(512, 512, [150, 140, 120, 137])?;
    let mut rng = SeededRng::new(3);
    let (faulty, mask) = inject_dust(&clean, 50, &FaultRanges::default(), &mut rng)?;
    write_image(&faulty, &std::path::Path::new(&out).join("dust.png"))?;
    write_mask(&mask, &std::path::Path::new(&out).join("mask_dust.png"))?;
    println!("{} pixels under dust", mask.count());
    Ok(())
}
