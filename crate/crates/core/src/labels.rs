//! Combined and subtraction-based masks, and the per-sample and run-level
//! JSON manifests.

use std::collections::BTreeMap;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::camera::CameraModel;
use crate::error::{Error, Result};
use crate::inject::{FaultFlags, FaultParams, FaultRanges};
use crate::raster::{FaultMask, ImageRgbi};
use crate::scene::{DatasetVariables, Stage, SunPixel};

pub const GENERATOR_VERSION: &str = concat!("faultsim ", env!("CARGO_PKG_VERSION"));

/// Pixel-wise OR of equally sized masks.
pub fn combined_mask<'a>(masks: impl IntoIterator<Item = &'a FaultMask>) -> Result<FaultMask> {
    let mut it = masks.into_iter();
    let mut out = it
        .next()
        .cloned()
        .ok_or_else(|| Error::invalid("combined_mask needs at least one mask"))?;
    for m in it {
        out.union_with(m)?;
    }
    Ok(out)
}

/// Pixels whose largest channel difference between the two renders is at least `tau`.
pub fn straylight_mask(with_flares: &ImageRgbi, without_flares: &ImageRgbi, tau: u8) -> Result<FaultMask> {
    with_flares.diff_mask_at_least(without_flares, tau)
}

/// Where the clean image came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BackgroundSource {
    Procedural,
    Imported { path: String },
}

/// Output file names, relative to the sample directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleFiles {
    pub image: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flare_free: Option<String>,
    /// Keyed by fault class name.
    pub masks: BTreeMap<String, String>,
    pub mask_all: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleManifest {
    pub generator_version: String,
    pub rng_algorithm: String,
    pub euler_convention: String,
    pub sample_index: usize,
    pub master_seed: u64,
    pub sub_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage: Option<Stage>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variables: Option<DatasetVariables>,
    pub sun: SunPixel,
    pub camera: CameraModel,
    pub background: BackgroundSource,
    pub tau: u8,
    pub ranges: FaultRanges,
    pub flags: FaultFlags,
    pub params: FaultParams,
    pub files: SampleFiles,
    /// Top-level fields this version does not know, kept for rewriting.
    #[serde(skip)]
    pub extra: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub dust: usize,
    pub broken_pixels: usize,
    pub broken_lines: usize,
    pub vignetting: usize,
    pub optics_degradation: usize,
    pub straylight: usize,
}

impl ClassCounts {
    pub fn tally<'a>(flags: impl IntoIterator<Item = &'a FaultFlags>) -> Self {
        let mut c = ClassCounts {
            dust: 0,
            broken_pixels: 0,
            broken_lines: 0,
            vignetting: 0,
            optics_degradation: 0,
            straylight: 0,
        };
        for f in flags {
            c.dust += f.dust as usize;
            c.broken_pixels += f.broken_pixels as usize;
            c.broken_lines += f.broken_lines as usize;
            c.vignetting += f.vignetting as usize;
            c.optics_degradation += f.optics_degradation as usize;
            c.straylight += f.straylight as usize;
        }
        c
    }
}

/// Run-level manifest. Holds no timestamps so reruns are byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub generator_version: String,
    pub rng_algorithm: String,
    pub master_seed: u64,
    pub n_total: usize,
    pub faulty_fraction: f64,
    pub n_straylight: usize,
    pub n_faulty: usize,
    pub class_counts: ClassCounts,
    pub camera: CameraModel,
    pub samples: Vec<String>,
    #[serde(skip)]
    pub extra: Map<String, Value>,
}

trait Extras {
    fn extra(&self) -> &Map<String, Value>;
    fn extra_mut(&mut self) -> &mut Map<String, Value>;
}

impl Extras for SampleManifest {
    fn extra(&self) -> &Map<String, Value> {
        &self.extra
    }
    fn extra_mut(&mut self) -> &mut Map<String, Value> {
        &mut self.extra
    }
}

impl Extras for RunManifest {
    fn extra(&self) -> &Map<String, Value> {
        &self.extra
    }
    fn extra_mut(&mut self) -> &mut Map<String, Value> {
        &mut self.extra
    }
}

fn to_json<T: Serialize + Extras>(m: &T) -> Result<String> {
    let mut value = serde_json::to_value(m).map_err(|e| Error::Invariant(format!("manifest serialization: {e}")))?;
    if let Value::Object(map) = &mut value {
        for (k, v) in m.extra() {
            map.entry(k.clone()).or_insert_with(|| v.clone());
        }
    }
    let mut text =
        serde_json::to_string_pretty(&value).map_err(|e| Error::Invariant(format!("manifest serialization: {e}")))?;
    text.push('\n');
    Ok(text)
}

/// Strict typed parse with field paths in errors, then a second untyped pass
/// to keep unknown top-level fields.
fn from_json<T: Serialize + DeserializeOwned + Extras>(text: &str) -> Result<T> {
    let mut de = serde_json::Deserializer::from_str(text);
    let mut m: T = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        Error::Manifest {
            field,
            line: inner.line(),
            column: inner.column(),
            message: inner.to_string(),
        }
    })?;
    de.end().map_err(|e| Error::Manifest {
        field: ".".into(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let known = serde_json::to_value(&m).map_err(|e| Error::Invariant(e.to_string()))?;
    if let (Ok(Value::Object(all)), Value::Object(known)) = (serde_json::from_str::<Value>(text), known) {
        for (k, v) in all {
            if !known.contains_key(&k) && !is_optional_field(&k) {
                m.extra_mut().insert(k, v);
            }
        }
    }
    Ok(m)
}

/// Known fields that may be omitted on output.
fn is_optional_field(k: &str) -> bool {
    matches!(k, "stage" | "variables")
}

pub fn manifest_to_string(m: &SampleManifest) -> Result<String> {
    to_json(m)
}

pub fn manifest_from_str(text: &str) -> Result<SampleManifest> {
    from_json(text)
}

pub fn write_manifest(m: &SampleManifest, path: &Path) -> Result<()> {
    std::fs::write(path, to_json(m)?).map_err(|e| Error::io(path, e))
}

pub fn read_manifest(path: &Path) -> Result<SampleManifest> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_json(&text)
}

pub fn write_run_manifest(m: &RunManifest, path: &Path) -> Result<()> {
    std::fs::write(path, to_json(m)?).map_err(|e| Error::io(path, e))
}

pub fn read_run_manifest(path: &Path) -> Result<RunManifest> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_json(&text)
}
