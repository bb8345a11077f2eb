//! cos^4 vignetting on a flat white frame: prints the attenuation along the diagonal.

use faultsim::inject::{inject_vignetting, FaultRanges};
use faultsim::{CameraModel, ImageRgbi};

fn main() -> faultsim::Result<()> {
    let cam = CameraModel::standard();
    let clean = ImageRgbi::new(cam.width(), cam.height(), [255; 4])?;
    for e0 in [255u8, 180, 105] {
        let (out, mask) = inject_vignetting(&clean, e0, &cam, &FaultRanges::default())?;
        let diag: Vec<u8> = (0..=4).map(|k| out.get(k * 128, k * 128)[3]).collect();
        println!("E0={e0:3}: diagonal {diag:?}, {} pixels attenuated", mask.count());
    }
    Ok(())
}
