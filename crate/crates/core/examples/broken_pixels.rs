//! Hot pixels on a CCD (with readout lines) and on a CMOS sensor.

use faultsim::inject::{inject_broken_pixels, FaultRanges, LineDirection, SensorArchitecture};
use faultsim::{ImageRgbi, SeededRng};

fn main() -> faultsim::Result<()> {
    let clean = ImageRgbi::new(256, 256, [20; 4])?;
    let ranges = FaultRanges::default();
    for sensor in [SensorArchitecture::FullFrameCcd, SensorArchitecture::Cmos] {
        let mut rng = SeededRng::new(11);
        let (_, mask, params) =
            inject_broken_pixels(&clean, 40, sensor, LineDirection::Right, &ranges, &mut rng)?;
        let lines = params.pixels.iter().filter(|p| p.line_brightness.unwrap_or(0) > 0).count();
        println!("{sensor:?}: {} defects, {lines} with readout lines, {} masked pixels", params.count, mask.count());
    }
    Ok(())
}
