//! Every fault class at once with explicitly fixed parameters: 50 grains,
//! full-frame CCD with rightward readout, 9 hot pixels, 5 lines (3 white),
//! flares 3/4/5, E0 = 255 and a 3-pixel blur.
//!
//! cargo run --release --example reference_sample -- [out_dir]

use std::path::Path;

use faultsim::dataset::{generate_sample, write_sample};
use faultsim::inject::{FaultFlags, ParamOverrides, PipelineConfig};
use faultsim::labels::BackgroundSource;
use faultsim::scene::{ProceduralBackground, Stage};

fn main() -> faultsim::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "out_reference".into());
    let overrides: ParamOverrides =
        serde_json::from_str(include_str!("../configs/reference_params.json")).expect("bundled overrides parse");
    let cfg = PipelineConfig {
        overrides,
        ..PipelineConfig::default()
    };
    let (sample, manifest) = generate_sample(
        9,
        0,
        Stage::SunFacing,
        &FaultFlags::all(),
        &cfg,
        &ProceduralBackground,
        BackgroundSource::Procedural,
    )?;
    write_sample(Path::new(&out), &sample, &manifest)?;
    println!("{}", serde_json::to_string_pretty(&manifest.params).unwrap());
    Ok(())
}
