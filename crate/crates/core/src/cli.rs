//! Command-line front end: `generate`, `inject` and `dump-textures`.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::camera::CameraModel;
use crate::dataset::{generate_dataset, DatasetSpec, RunSummary};
use crate::error::{Error, Result};
use crate::inject::{
    apply_pipeline, FaultClass, FaultFlags, FaultRanges, MatrixOptions, ParamOverrides, PipelineConfig,
};
use crate::io::{read_image, write_gray, write_rgba};
use crate::labels::{BackgroundSource, SampleManifest, GENERATOR_VERSION};
use crate::rng::{SeededRng, RNG_ALGORITHM};
use crate::scene::background::{parse_sun_coords, read_sun_sidecar, sidecar_path};
use crate::scene::frames::EULER_CONVENTION;
use crate::scene::{ImportedBackgrounds, ProceduralBackground, SunPixel};
use crate::textures::kernel::validate_kernel_size;
use crate::textures::{
    dust_grain, flare_primitive, gaussian_kernel, glare_primitive, vignette_field, GrainParams, FLARE_COUNT,
    GLARE_COUNT,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_) | Error::Precondition(_) | Error::Manifest { .. } => EXIT_USAGE,
        Error::Io { .. } | Error::Image { .. } => EXIT_IO,
        Error::Invariant(_) => EXIT_INVARIANT,
    }
}

#[derive(Debug, Parser)]
#[command(name = "faultsim", version, about = "Camera fault injection and labelled dataset generation")]
pub struct Cli {
    /// Print the result as one JSON document on stdout.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a labelled dataset.
    Generate(GenerateArgs),
    /// Inject faults into one existing image.
    Inject(InjectArgs),
    /// Write texture primitives as PNG files.
    DumpTextures(DumpArgs),
}

#[derive(Debug, clap::Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub fraction: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON run configuration; command-line values take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, clap::Args)]
pub struct InjectArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Light source pixel `U,V`; defaults to the `<stem>.sun.txt` sidecar.
    #[arg(long)]
    pub sun: Option<String>,
    /// Comma-separated fault classes, or `all`.
    #[arg(long, default_value = "")]
    pub faults: String,
    /// JSON file of explicit parameter values.
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Horizontal field of view in degrees.
    #[arg(long, default_value_t = 65.0)]
    pub fov: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TextureKind {
    Grain,
    Flares,
    Vignette,
    Kernel,
    All,
}

#[derive(Debug, clap::Args)]
pub struct DumpArgs {
    #[arg(long, value_enum)]
    pub kind: TextureKind,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 200.0)]
    pub peak: f64,
    #[arg(long, default_value_t = 3.0)]
    pub sigma_xx: f64,
    #[arg(long, default_value_t = 6.0)]
    pub sigma_yy: f64,
    #[arg(long, default_value_t = 255)]
    pub e0: u8,
    /// Kernel size; all legal sizes when omitted.
    #[arg(long)]
    pub size: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum BackgroundMode {
    Procedural,
    /// PNG files with optional `<stem>.sun.txt` sidecars, used round-robin.
    Import { paths: Vec<PathBuf> },
}

fn default_count() -> usize {
    100
}
fn default_fraction() -> f64 {
    0.5
}
fn default_enabled() -> Vec<String> {
    FaultClass::ALL.iter().map(|c| c.name().to_string()).collect()
}
fn default_background() -> BackgroundMode {
    BackgroundMode::Procedural
}
fn default_tau() -> u8 {
    crate::inject::pipeline::DEFAULT_TAU
}

/// JSON run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_count")]
    pub n_total: usize,
    #[serde(default = "default_fraction")]
    pub faulty_fraction: f64,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default = "CameraModel::standard")]
    pub camera: CameraModel,
    #[serde(default = "default_enabled")]
    pub enabled: Vec<String>,
    #[serde(default)]
    pub ranges: FaultRanges,
    /// Required for ranges wider than the nominal bounds.
    #[serde(default)]
    pub unsafe_ranges: bool,
    #[serde(default)]
    pub overrides: ParamOverrides,
    #[serde(default)]
    pub matrix: MatrixOptions,
    #[serde(default = "default_tau")]
    pub tau: u8,
    #[serde(default = "default_background")]
    pub background: BackgroundMode,
    #[serde(default)]
    pub workers: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let mut de = serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(&mut de).map_err(|e| {
            let field = e.path().to_string();
            let inner = e.into_inner();
            Error::Manifest {
                field,
                line: inner.line(),
                column: inner.column(),
                message: inner.to_string(),
            }
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.faulty_fraction) {
            return Err(Error::invalid(format!(
                "faulty_fraction must lie in [0, 1], got {}",
                self.faulty_fraction
            )));
        }
        if self.workers == Some(0) {
            return Err(Error::invalid("workers must be at least 1"));
        }
        self.ranges.validate(self.unsafe_ranges)?;
        self.enabled_flags().map(|_| ())
    }

    pub fn enabled_flags(&self) -> Result<FaultFlags> {
        FaultFlags::parse_list(&self.enabled.join(","))
    }

    pub fn dataset_spec(&self) -> Result<DatasetSpec> {
        Ok(DatasetSpec {
            n_total: self.n_total,
            faulty_fraction: self.faulty_fraction,
            master_seed: self.master_seed,
            matrix: self.matrix,
            enabled: self.enabled_flags()?,
            pipeline: PipelineConfig {
                camera: self.camera.clone(),
                ranges: self.ranges.clone(),
                overrides: self.overrides.clone(),
                tau: self.tau,
            },
        })
    }
}

/// Runs `generate` with an already merged configuration.
pub fn cmd_generate(cfg: &RunConfig) -> Result<RunSummary> {
    cfg.validate()?;
    let out = cfg
        .out_dir
        .clone()
        .ok_or_else(|| Error::invalid("out_dir: an output directory is required (--out)"))?;
    let spec = cfg.dataset_spec()?;
    let workers = cfg.workers.unwrap_or_else(|| rayon::current_num_threads());
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Invariant(format!("thread pool: {e}")))?;
    pool.install(|| match &cfg.background {
        BackgroundMode::Procedural => {
            generate_dataset(&spec, &out, &ProceduralBackground, |_| BackgroundSource::Procedural)
        }
        BackgroundMode::Import { paths } => {
            let provider = ImportedBackgrounds::new(paths.clone())?;
            let n = paths.len();
            generate_dataset(&spec, &out, &provider, |i| BackgroundSource::Imported {
                path: paths[i % n].to_string_lossy().into_owned(),
            })
        }
    })
}

fn merged_config(args: &GenerateArgs) -> Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(n) = args.count {
        cfg.n_total = n;
    }
    if let Some(f) = args.fraction {
        cfg.faulty_fraction = f;
    }
    if let Some(s) = args.seed {
        cfg.master_seed = s;
    }
    if let Some(o) = &args.out {
        cfg.out_dir = Some(o.clone());
    }
    if let Some(w) = args.workers {
        cfg.workers = Some(w);
    }
    Ok(cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectOutput {
    pub image: PathBuf,
    pub flare_free: Option<PathBuf>,
    pub masks: Vec<PathBuf>,
    pub manifest: PathBuf,
}

/// Applies the requested faults to one image.
pub fn cmd_inject(args: &InjectArgs) -> Result<InjectOutput> {
    let flags = FaultFlags::parse_list(&args.faults)?;
    let overrides: ParamOverrides = match &args.params {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            let mut de = serde_json::Deserializer::from_str(&text);
            serde_path_to_error::deserialize(&mut de).map_err(|e| {
                let field = e.path().to_string();
                let inner = e.into_inner();
                Error::Manifest {
                    field,
                    line: inner.line(),
                    column: inner.column(),
                    message: inner.to_string(),
                }
            })?
        }
        None => ParamOverrides::default(),
    };
    let sun_uv = match &args.sun {
        Some(s) => Some(parse_sun_coords(s)?),
        None => read_sun_sidecar(&sidecar_path(&args.input))?,
    };
    if flags.straylight && sun_uv.is_none() {
        return Err(Error::invalid("straylight needs --sun U,V or a .sun.txt sidecar"));
    }
    let img = read_image(&args.input)?;
    let camera = CameraModel::new(args.fov, img.width(), img.height())?;
    let sun = match sun_uv {
        Some((u, v)) => SunPixel::ahead(u, v, &camera),
        None => SunPixel {
            u: f64::MAX,
            v: f64::MAX,
            in_fov: false,
            behind: true,
        },
    };
    let cfg = PipelineConfig {
        camera: camera.clone(),
        ranges: FaultRanges::default(),
        overrides,
        tau: crate::inject::pipeline::DEFAULT_TAU,
    };
    let rng = SeededRng::new(args.seed);
    let sample = apply_pipeline(&img, &sun, &flags, &cfg, &rng)?;
    let manifest = SampleManifest {
        generator_version: GENERATOR_VERSION.into(),
        rng_algorithm: RNG_ALGORITHM.into(),
        euler_convention: EULER_CONVENTION.into(),
        sample_index: 0,
        master_seed: args.seed,
        sub_seed: rng.seed(),
        stage: None,
        variables: None,
        sun,
        camera,
        background: BackgroundSource::Imported {
            path: args.input.to_string_lossy().into_owned(),
        },
        tau: cfg.tau,
        ranges: cfg.ranges.clone(),
        flags: sample.flags(),
        params: sample.params.clone(),
        files: crate::dataset::sample_files(sample.flare_free.is_some()),
        extra: Default::default(),
    };
    crate::dataset::write_sample(&args.out, &sample, &manifest)?;
    let f = &manifest.files;
    Ok(InjectOutput {
        image: args.out.join(&f.image),
        flare_free: f.flare_free.as_ref().map(|n| args.out.join(n)),
        masks: f
            .masks
            .values()
            .chain(std::iter::once(&f.mask_all))
            .map(|n| args.out.join(n))
            .collect(),
        manifest: args.out.join("manifest.json"),
    })
}

/// Writes texture panels and returns the file paths.
pub fn cmd_dump_textures(args: &DumpArgs) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
    let mut written = Vec::new();
    let kinds: &[TextureKind] = match args.kind {
        TextureKind::All => &[TextureKind::Grain, TextureKind::Flares, TextureKind::Vignette, TextureKind::Kernel],
        ref k => std::slice::from_ref(k),
    };
    for kind in kinds {
        match kind {
            TextureKind::Grain => {
                let params = GrainParams {
                    peak: args.peak,
                    sigma_xx: args.sigma_xx,
                    sigma_yy: args.sigma_yy,
                    sigma_xy: 0.0,
                };
                let tex = dust_grain(&params)?;
                let p = args.out.join("grain.png");
                write_gray(&tex.to_gray8(), tex.width, tex.height, &p)?;
                written.push(p);
            }
            TextureKind::Flares => {
                for i in 1..=FLARE_COUNT as u8 {
                    let tex = flare_primitive(i)?;
                    let p = args.out.join(format!("flare_{i:02}.png"));
                    write_rgba(&tex.to_rgba8(), tex.width, tex.height, &p)?;
                    written.push(p);
                }
                for i in 1..=GLARE_COUNT as u8 {
                    let tex = glare_primitive(i)?;
                    let p = args.out.join(format!("glare_{i}.png"));
                    write_rgba(&tex.to_rgba8(), tex.width, tex.height, &p)?;
                    written.push(p);
                }
            }
            TextureKind::Vignette => {
                let cam = CameraModel::standard();
                let tex = vignette_field(args.e0, &cam);
                let p = args.out.join(format!("vignette_e0_{}.png", args.e0));
                write_gray(&tex.to_gray8(), tex.width, tex.height, &p)?;
                written.push(p);
            }
            TextureKind::Kernel => {
                let sizes: Vec<usize> = match args.size {
                    Some(s) => {
                        validate_kernel_size(s)?;
                        vec![s]
                    }
                    None => (3..=17).step_by(2).collect(),
                };
                for s in sizes {
                    let k = gaussian_kernel(s)?;
                    let m = k.to_matrix();
                    let peak = m.iter().copied().fold(0.0, f64::max);
                    let gray: Vec<u8> = m.iter().map(|&v| crate::raster::quantize(255.0 * v / peak)).collect();
                    let p = args.out.join(format!("kernel_{s:02}.png"));
                    write_gray(&gray, s, s, &p)?;
                    written.push(p);
                }
            }
            TextureKind::All => unreachable!(),
        }
    }
    Ok(written)
}

fn emit<T: Serialize>(json: bool, value: &T, human: impl FnOnce() -> String) {
    if json {
        println!("{}", serde_json::to_string_pretty(value).expect("summary serializes"));
    } else {
        println!("{}", human());
    }
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Generate(a) => merged_config(a).and_then(|cfg| cmd_generate(&cfg)).map(|s| {
            emit(cli.json, &s, || {
                format!(
                    "wrote {} samples ({} faulty, {} straylight) to {} in {:.2} s",
                    s.n_total,
                    s.n_faulty,
                    s.n_straylight,
                    s.out_dir.display(),
                    s.wall_time_s
                )
            })
        }),
        Command::Inject(a) => cmd_inject(a).map(|o| emit(cli.json, &o, || format!("wrote {}", o.image.display()))),
        Command::DumpTextures(a) => {
            cmd_dump_textures(a).map(|files| emit(cli.json, &files, || format!("wrote {} textures", files.len())))
        }
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
