//! Generate one sample, read its manifest back and regenerate it bit for bit.

use faultsim::dataset::{generate_sample, regenerate};
use faultsim::inject::{FaultFlags, PipelineConfig};
use faultsim::labels::{manifest_from_str, manifest_to_string, BackgroundSource};
use faultsim::scene::{ProceduralBackground, Stage};

fn main() -> faultsim::Result<()> {
    let mut cfg = PipelineConfig::default();
    cfg.camera = cfg.camera.with_resolution(256, 256)?;
    let (sample, manifest) = generate_sample(
        1,
        3,
        Stage::SunFacing,
        &FaultFlags::all(),
        &cfg,
        &ProceduralBackground,
        BackgroundSource::Procedural,
    )?;
    let text = manifest_to_string(&manifest)?;
    let parsed = manifest_from_str(&text)?;
    assert_eq!(parsed, manifest);
    let again = regenerate(&parsed)?;
    println!("manifest {} bytes, regenerated identical: {}", text.len(), again == sample);
    Ok(())
}
