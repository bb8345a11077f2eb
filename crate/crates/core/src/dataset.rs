//! Dataset generation: per-index sub-seeds, backgrounds, fault pipeline,
//! sample directories and regeneration from a manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inject::{
    apply_faults, apply_pipeline, build_injection_matrix, FaultClass, FaultFlags, FaultySample, InjectionMatrix,
    MatrixOptions, PipelineConfig,
};
use crate::io::{write_image, write_mask};
use crate::labels::{
    combined_mask, write_manifest, write_run_manifest, BackgroundSource, ClassCounts, RunManifest, SampleFiles,
    SampleManifest, GENERATOR_VERSION,
};
use crate::rng::{SeededRng, Stream, RNG_ALGORITHM};
use crate::scene::frames::EULER_CONVENTION;
use crate::scene::{
    plan_from_count, render_background, sample_variables, BackgroundProvider, DatasetVariables, ProceduralBackground,
    Stage, SunPixel,
};

/// Everything a generation run needs besides the background provider.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub n_total: usize,
    pub faulty_fraction: f64,
    pub master_seed: u64,
    #[serde(default)]
    pub matrix: MatrixOptions,
    /// Classes allowed to appear; disabled rows of the matrix are cleared.
    #[serde(default = "FaultFlags::all")]
    pub enabled: FaultFlags,
    #[serde(flatten)]
    pub pipeline: PipelineConfig,
}

impl DatasetSpec {
    pub fn new(n_total: usize, faulty_fraction: f64, master_seed: u64) -> Self {
        Self {
            n_total,
            faulty_fraction,
            master_seed,
            matrix: MatrixOptions::default(),
            enabled: FaultFlags::all(),
            pipeline: PipelineConfig::default(),
        }
    }
}

/// The run plan: one stage and one flag set per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetPlan {
    pub matrix: InjectionMatrix,
    pub stages: Vec<Stage>,
}

impl DatasetPlan {
    pub fn flags(&self, index: usize, enabled: &FaultFlags) -> FaultFlags {
        let mut f = self.matrix.column(index);
        for c in FaultClass::ALL {
            f.set(c, f.get(c) && enabled.get(c));
        }
        f
    }
}

/// Builds the matrix from the `Matrix` stream of the master seed; samples
/// carrying straylight are exactly the Sun-facing ones.
pub fn plan_dataset(spec: &DatasetSpec) -> Result<DatasetPlan> {
    let mut rng = SeededRng::new(spec.master_seed).stream(Stream::Matrix);
    let matrix = build_injection_matrix(spec.n_total, spec.faulty_fraction, &spec.matrix, &mut rng)?;
    let stages = plan_from_count(spec.n_total, matrix.n_straylight());
    Ok(DatasetPlan { matrix, stages })
}

/// The sub-seed generator of sample `index`.
pub fn sample_rng(master_seed: u64, index: usize) -> SeededRng {
    SeededRng::new(master_seed).derive(index as u64)
}

pub fn sample_dir_name(index: usize) -> String {
    format!("{index:06}")
}

pub fn sample_files(has_flare_free: bool) -> SampleFiles {
    SampleFiles {
        image: "image.png".into(),
        flare_free: has_flare_free.then(|| "flare_free.png".into()),
        masks: FaultClass::ALL
            .iter()
            .map(|c| (c.name().to_string(), format!("mask_{}.png", c.name())))
            .collect::<BTreeMap<_, _>>(),
        mask_all: "mask_all.png".into(),
    }
}

/// Renders one sample.
pub fn generate_sample(
    master_seed: u64,
    index: usize,
    stage: Stage,
    flags: &FaultFlags,
    cfg: &PipelineConfig,
    provider: &dyn BackgroundProvider,
    source: BackgroundSource,
) -> Result<(FaultySample, SampleManifest)> {
    let rng = sample_rng(master_seed, index);
    let vars = sample_variables(stage, &cfg.camera, &mut rng.stream(Stream::Variables));
    let (background, sun) = provider.background(index, &vars, &cfg.camera, &mut rng.stream(Stream::Background))?;
    let sample = apply_pipeline(&background, &sun, flags, cfg, &rng)?;
    let manifest = SampleManifest {
        generator_version: GENERATOR_VERSION.into(),
        rng_algorithm: RNG_ALGORITHM.into(),
        euler_convention: EULER_CONVENTION.into(),
        sample_index: index,
        master_seed,
        sub_seed: rng.seed(),
        stage: Some(stage),
        variables: Some(vars),
        sun,
        camera: cfg.camera.clone(),
        background: source,
        tau: cfg.tau,
        ranges: cfg.ranges.clone(),
        flags: sample.flags(),
        params: sample.params.clone(),
        files: sample_files(sample.flare_free.is_some()),
        extra: Default::default(),
    };
    Ok((sample, manifest))
}

/// Writes every file named in the manifest into `dir`.
pub fn write_sample(dir: &Path, sample: &FaultySample, manifest: &SampleManifest) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = &manifest.files;
    write_image(&sample.faulty, &dir.join(&files.image))?;
    if let (Some(name), Some(img)) = (&files.flare_free, &sample.flare_free) {
        write_image(img, &dir.join(name))?;
    }
    for class in FaultClass::ALL {
        let name = files
            .masks
            .get(class.name())
            .ok_or_else(|| Error::Invariant(format!("manifest lacks a {} mask entry", class.name())))?;
        write_mask(sample.mask(class), &dir.join(name))?;
    }
    write_mask(&combined_mask(&sample.masks)?, &dir.join(&files.mask_all))?;
    write_manifest(manifest, &dir.join("manifest.json"))
}

/// Rebuilds a sample from its manifest alone. Procedural backgrounds are
/// re-rendered from the recorded variables and sub-seed; imported ones are
/// read from the recorded path.
pub fn regenerate(manifest: &SampleManifest) -> Result<FaultySample> {
    let cfg = PipelineConfig {
        camera: manifest.camera.clone(),
        ranges: manifest.ranges.clone(),
        overrides: Default::default(),
        tau: manifest.tau,
    };
    let background = match &manifest.background {
        BackgroundSource::Procedural => {
            let vars = manifest
                .variables
                .as_ref()
                .ok_or_else(|| Error::invalid("procedural sample manifest has no dataset variables"))?;
            let mut rng = SeededRng::new(manifest.sub_seed).stream(Stream::Background);
            render_background(vars, &cfg.camera, &mut rng).0
        }
        BackgroundSource::Imported { path } => crate::io::read_image(Path::new(path))?,
    };
    apply_faults(&background, &manifest.params, &cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub n_total: usize,
    pub n_faulty: usize,
    pub n_straylight: usize,
    pub class_counts: ClassCounts,
    pub wall_time_s: f64,
    pub run_manifest: PathBuf,
}

/// Generates and writes a whole dataset. Samples are processed on the
/// current rayon pool; results do not depend on its size.
pub fn generate_dataset(
    spec: &DatasetSpec,
    out: &Path,
    provider: &dyn BackgroundProvider,
    source: impl Fn(usize) -> BackgroundSource + Sync,
) -> Result<RunSummary> {
    let started = std::time::Instant::now();
    if !(0.0..=1.0).contains(&spec.faulty_fraction) {
        return Err(Error::invalid(format!(
            "faulty_fraction must lie in [0, 1], got {}",
            spec.faulty_fraction
        )));
    }
    spec.pipeline.ranges.validate(true)?;
    let plan = plan_dataset(spec)?;
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let flags: Vec<FaultFlags> = (0..spec.n_total).map(|i| plan.flags(i, &spec.enabled)).collect();
    (0..spec.n_total).into_par_iter().try_for_each(|i| {
        let (sample, manifest) = generate_sample(
            spec.master_seed,
            i,
            plan.stages[i],
            &flags[i],
            &spec.pipeline,
            provider,
            source(i),
        )?;
        write_sample(&out.join(sample_dir_name(i)), &sample, &manifest)
    })?;
    let class_counts = ClassCounts::tally(&flags);
    let n_faulty = flags.iter().filter(|f| f.any()).count();
    let run = RunManifest {
        generator_version: GENERATOR_VERSION.into(),
        rng_algorithm: RNG_ALGORITHM.into(),
        master_seed: spec.master_seed,
        n_total: spec.n_total,
        faulty_fraction: spec.faulty_fraction,
        n_straylight: plan.matrix.n_straylight(),
        n_faulty,
        class_counts: class_counts.clone(),
        camera: spec.pipeline.camera.clone(),
        samples: (0..spec.n_total).map(sample_dir_name).collect(),
        extra: Default::default(),
    };
    let run_path = out.join("run.json");
    write_run_manifest(&run, &run_path)?;
    Ok(RunSummary {
        out_dir: out.to_path_buf(),
        n_total: spec.n_total,
        n_faulty,
        n_straylight: plan.matrix.n_straylight(),
        class_counts,
        wall_time_s: started.elapsed().as_secs_f64(),
        run_manifest: run_path,
    })
}

/// Convenience for procedural runs.
pub fn generate_procedural(spec: &DatasetSpec, out: &Path) -> Result<RunSummary> {
    generate_dataset(spec, out, &ProceduralBackground, |_| BackgroundSource::Procedural)
}

/// Variables and Sun pixel for sample `index` without rendering anything.
pub fn sample_geometry(spec: &DatasetSpec, stage: Stage, index: usize) -> (DatasetVariables, SunPixel) {
    let rng = sample_rng(spec.master_seed, index);
    let vars = sample_variables(stage, &spec.pipeline.camera, &mut rng.stream(Stream::Variables));
    let sun = vars.sun_pixel(&spec.pipeline.camera);
    (vars, sun)
}
