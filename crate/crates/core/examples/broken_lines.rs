//! Dead and saturated lines. Full-frame CCDs refuse mixed row/column faults.

use faultsim::inject::{
    apply_broken_lines, sample_broken_lines, BrokenLine, BrokenLineParams, LineDirection, LineOrientation, Polarity,
    SensorArchitecture,
};
use faultsim::{ImageRgbi, SeededRng};

fn main() -> faultsim::Result<()> {
    let clean = ImageRgbi::new(128, 128, [90; 4])?;
    let mut rng = SeededRng::new(5);
    let params = sample_broken_lines(5, Some(3), SensorArchitecture::Cmos, LineDirection::Up, clean.dims(), &mut rng)?;
    let (_, mask) = apply_broken_lines(&clean, &params)?;
    println!("CMOS: {} white, {} black, {} pixels", params.white_count(), params.black_count(), mask.count());

    let mixed = BrokenLineParams {
        sensor: SensorArchitecture::FullFrameCcd,
        count: 2,
        lines: vec![
            BrokenLine { orientation: LineOrientation::Row, index: 4, polarity: Polarity::White },
            BrokenLine { orientation: LineOrientation::Column, index: 9, polarity: Polarity::Black },
        ],
    };
    match apply_broken_lines(&clean, &mixed) {
        Ok(_) => println!("unexpected: mixed lines accepted"),
        Err(e) => println!("full-frame CCD: {e}"),
    }
    Ok(())
}
