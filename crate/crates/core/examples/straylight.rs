//! Flares along the Sun-to-center line, with and without the flare layer.
//!
//! cargo run --release --example straylight -- [out_dir]

use std::path::Path;

use faultsim::inject::{inject_straylight, FaultRanges};
use faultsim::io::write_image;
use faultsim::scene::SunPixel;
use faultsim::{CameraModel, ImageRgbi, SeededRng};

fn main() -> faultsim::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "out_straylight".into());
    std::fs::create_dir_all(&out).map_err(|e| faultsim::Error::io(&out, e))?;
    let cam = CameraModel::standard();
    let clean = ImageRgbi::new(cam.width(), cam.height(), [12, 12, 18, 14])?;
    let sun = SunPixel::ahead(180.0, 260.0, &cam);
    let mut rng = SeededRng::new(21);
    let (faulty, layer, params) = inject_straylight(&clean, &sun, &FaultRanges::default(), &mut rng)?;
    for f in &params.flares {
        let c = params.flare_center(f.position, clean.dims());
        println!("flare {:2} ({:?}) t={:.2} at ({:.1}, {:.1})", f.index, f.group, f.position, c[0], c[1]);
    }
    println!("glare: {:?}", params.glare);
    println!("layer touches {} pixels", layer.values.iter().filter(|&&v| v > 0.0).count());
    write_image(&faulty, &Path::new(&out).join("straylight.png"))
}
