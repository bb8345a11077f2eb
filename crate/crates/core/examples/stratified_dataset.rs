//! A small two-stage dataset written to disk.
//!
//! cargo run --release --example stratified_dataset -- [out_dir] [count]

use faultsim::dataset::{generate_procedural, DatasetSpec};

fn main() -> faultsim::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = args.next().unwrap_or_else(|| "out_dataset".into());
    let count = args.next().and_then(|s| s.parse().ok()).unwrap_or(24);
    let mut spec = DatasetSpec::new(count, 0.5, 7);
    spec.pipeline.camera = spec.pipeline.camera.with_resolution(512, 512)?;
    let summary = generate_procedural(&spec, out.as_ref())?;
    println!("{}", serde_json::to_string_pretty(&summary).unwrap());
    Ok(())
}
