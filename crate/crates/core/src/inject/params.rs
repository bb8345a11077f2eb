//! Fault classes, sampling ranges and realized per-sample parameter records.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::textures::{FlareGroup, GrainParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaultClass {
    DustOnOptics,
    BrokenPixels,
    BrokenLines,
    Vignetting,
    OpticsDegradation,
    Straylight,
}

impl FaultClass {
    /// Injection-matrix row order; straylight is last.
    pub const ALL: [FaultClass; 6] = [
        FaultClass::DustOnOptics,
        FaultClass::BrokenPixels,
        FaultClass::BrokenLines,
        FaultClass::Vignetting,
        FaultClass::OpticsDegradation,
        FaultClass::Straylight,
    ];

    pub const COUNT: usize = 6;

    pub fn row(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            FaultClass::DustOnOptics => "dust",
            FaultClass::BrokenPixels => "broken_pixels",
            FaultClass::BrokenLines => "broken_lines",
            FaultClass::Vignetting => "vignetting",
            FaultClass::OpticsDegradation => "optics_degradation",
            FaultClass::Straylight => "straylight",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        let key = name.trim().to_ascii_lowercase().replace('-', "_");
        let found = FaultClass::ALL.into_iter().find(|c| c.name() == key);
        match (found, key.as_str()) {
            (Some(c), _) => Ok(c),
            (None, "dust_on_optics") => Ok(FaultClass::DustOnOptics),
            (None, "blur") => Ok(FaultClass::OpticsDegradation),
            _ => Err(Error::invalid(format!("unknown fault class {name:?}"))),
        }
    }
}

/// One boolean per fault class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultFlags {
    pub dust: bool,
    pub broken_pixels: bool,
    pub broken_lines: bool,
    pub vignetting: bool,
    pub optics_degradation: bool,
    pub straylight: bool,
}

impl FaultFlags {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn all() -> Self {
        Self {
            dust: true,
            broken_pixels: true,
            broken_lines: true,
            vignetting: true,
            optics_degradation: true,
            straylight: true,
        }
    }

    pub fn only(class: FaultClass) -> Self {
        let mut f = Self::none();
        f.set(class, true);
        f
    }

    pub fn get(&self, class: FaultClass) -> bool {
        match class {
            FaultClass::DustOnOptics => self.dust,
            FaultClass::BrokenPixels => self.broken_pixels,
            FaultClass::BrokenLines => self.broken_lines,
            FaultClass::Vignetting => self.vignetting,
            FaultClass::OpticsDegradation => self.optics_degradation,
            FaultClass::Straylight => self.straylight,
        }
    }

    pub fn set(&mut self, class: FaultClass, on: bool) {
        match class {
            FaultClass::DustOnOptics => self.dust = on,
            FaultClass::BrokenPixels => self.broken_pixels = on,
            FaultClass::BrokenLines => self.broken_lines = on,
            FaultClass::Vignetting => self.vignetting = on,
            FaultClass::OpticsDegradation => self.optics_degradation = on,
            FaultClass::Straylight => self.straylight = on,
        }
    }

    pub fn any(&self) -> bool {
        FaultClass::ALL.iter().any(|&c| self.get(c))
    }

    /// Parses a comma-separated class list such as `dust,straylight`.
    pub fn parse_list(list: &str) -> Result<Self> {
        let mut flags = Self::none();
        for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            if name == "all" {
                return Ok(Self::all());
            }
            if name == "none" {
                continue;
            }
            flags.set(FaultClass::from_name(name)?, true);
        }
        Ok(flags)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SensorArchitecture {
    FullFrameCcd,
    FrameTransferCcd,
    InterlineCcd,
    Cmos,
}

impl SensorArchitecture {
    pub const ALL: [SensorArchitecture; 4] = [
        SensorArchitecture::FullFrameCcd,
        SensorArchitecture::FrameTransferCcd,
        SensorArchitecture::InterlineCcd,
        SensorArchitecture::Cmos,
    ];

    /// CCDs shift charge towards a readout register, so hot pixels smear.
    pub fn is_ccd(self) -> bool {
        !matches!(self, SensorArchitecture::Cmos)
    }

    /// Full-frame and frame-transfer readout faults hit rows or columns, never both.
    pub fn single_line_orientation(self) -> bool {
        matches!(
            self,
            SensorArchitecture::FullFrameCcd | SensorArchitecture::FrameTransferCcd
        )
    }
}

/// Readout direction of CCD subtended lines, fixed per image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineDirection {
    Up,
    Down,
    Right,
    Left,
}

impl LineDirection {
    pub const ALL: [LineDirection; 4] = [
        LineDirection::Up,
        LineDirection::Down,
        LineDirection::Right,
        LineDirection::Left,
    ];

    /// Pixel step `(dx, dy)`; rows grow downwards.
    pub fn step(self) -> (i64, i64) {
        match self {
            LineDirection::Up => (0, -1),
            LineDirection::Down => (0, 1),
            LineDirection::Right => (1, 0),
            LineDirection::Left => (-1, 0),
        }
    }

    /// Electronics-line orientation that shares this readout axis.
    pub fn line_orientation(self) -> LineOrientation {
        match self {
            LineDirection::Up | LineDirection::Down => LineOrientation::Column,
            LineDirection::Right | LineDirection::Left => LineOrientation::Row,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineOrientation {
    Row,
    Column,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Black,
    White,
}

impl Polarity {
    pub fn value(self) -> u8 {
        match self {
            Polarity::Black => 0,
            Polarity::White => 255,
        }
    }
}

/// Inclusive bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range<T> {
    pub min: T,
    pub max: T,
}

impl<T: PartialOrd + Copy + std::fmt::Debug> Range<T> {
    pub const fn new(min: T, max: T) -> Self {
        Self { min, max }
    }

    pub fn contains(&self, v: T) -> bool {
        v >= self.min && v <= self.max
    }

    pub fn within(&self, outer: &Range<T>) -> bool {
        self.min >= outer.min && self.max <= outer.max
    }

    fn check(&self, name: &str) -> Result<()> {
        if self.min > self.max {
            return Err(Error::invalid(format!("{name}: min {:?} exceeds max {:?}", self.min, self.max)));
        }
        Ok(())
    }
}

/// Sampling ranges for every fault parameter. Defaults are the nominal
/// published bounds; glare values have no published bounds and reuse the
/// flare brightness range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FaultRanges {
    pub dust_grains: Range<usize>,
    pub grain_peak: Range<f64>,
    pub grain_sigma: Range<f64>,
    pub broken_pixels: Range<usize>,
    pub pixel_brightness: Range<u8>,
    pub subtended_line_cap: u8,
    pub subtended_line_ratio: f64,
    pub broken_lines: Range<usize>,
    pub flares: Range<usize>,
    pub flare_position: Range<f64>,
    pub flare_radius: Range<f64>,
    pub flare_brightness: Range<f64>,
    pub glare_probability: f64,
    pub glare_brightness: Range<f64>,
    pub glare_radius: Range<f64>,
    pub vignetting_e0: Range<u8>,
    pub blur_size: Range<usize>,
}

impl Default for FaultRanges {
    fn default() -> Self {
        Self {
            dust_grains: Range::new(30, 100),
            grain_peak: Range::new(100.0, 200.0),
            grain_sigma: Range::new(3.0, 6.0),
            broken_pixels: Range::new(10, 150),
            pixel_brightness: Range::new(0, 255),
            subtended_line_cap: 65,
            subtended_line_ratio: 0.4,
            broken_lines: Range::new(1, 5),
            flares: Range::new(1, 10),
            flare_position: Range::new(0.5, 2.0),
            flare_radius: Range::new(0.05, 0.3),
            flare_brightness: Range::new(1.5, 2.5),
            glare_probability: 0.5,
            glare_brightness: Range::new(1.5, 2.5),
            glare_radius: Range::new(0.2, 0.5),
            vignetting_e0: Range::new(105, 255),
            blur_size: Range::new(3, 17),
        }
    }
}

impl FaultRanges {
    /// Internal consistency, plus containment in the nominal bounds unless
    /// `allow_widening` is set.
    pub fn validate(&self, allow_widening: bool) -> Result<()> {
        self.dust_grains.check("dust_grains")?;
        self.grain_peak.check("grain_peak")?;
        self.grain_sigma.check("grain_sigma")?;
        self.broken_pixels.check("broken_pixels")?;
        self.pixel_brightness.check("pixel_brightness")?;
        self.broken_lines.check("broken_lines")?;
        self.flares.check("flares")?;
        self.flare_position.check("flare_position")?;
        self.flare_radius.check("flare_radius")?;
        self.flare_brightness.check("flare_brightness")?;
        self.glare_brightness.check("glare_brightness")?;
        self.glare_radius.check("glare_radius")?;
        self.vignetting_e0.check("vignetting_e0")?;
        self.blur_size.check("blur_size")?;

        let hard = |ok: bool, name: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::invalid(format!("{name} outside its physical limits")))
            }
        };
        hard(self.dust_grains.min >= 1, "dust_grains")?;
        hard(self.grain_peak.min >= 0.0 && self.grain_peak.max <= 255.0, "grain_peak")?;
        hard(self.grain_sigma.min > 0.0, "grain_sigma")?;
        hard(self.broken_pixels.min >= 1, "broken_pixels")?;
        hard(self.broken_lines.min >= 1, "broken_lines")?;
        hard(self.flares.min >= 1 && self.flares.max <= 10, "flares")?;
        hard(self.flare_radius.min > 0.0, "flare_radius")?;
        hard(self.flare_brightness.min >= 0.0, "flare_brightness")?;
        hard((0.0..=1.0).contains(&self.glare_probability), "glare_probability")?;
        hard(self.glare_radius.min > 0.0, "glare_radius")?;
        hard(self.glare_brightness.min >= 0.0, "glare_brightness")?;
        hard(self.subtended_line_ratio >= 0.0, "subtended_line_ratio")?;
        hard(
            self.blur_size.min >= 3 && self.blur_size.max <= 17 && self.blur_size.min % 2 == 1,
            "blur_size",
        )?;

        if allow_widening {
            return Ok(());
        }
        let nominal = FaultRanges::default();
        let within = [
            ("dust_grains", self.dust_grains.within(&nominal.dust_grains)),
            ("grain_peak", self.grain_peak.within(&nominal.grain_peak)),
            ("grain_sigma", self.grain_sigma.within(&nominal.grain_sigma)),
            ("broken_pixels", self.broken_pixels.within(&nominal.broken_pixels)),
            ("pixel_brightness", self.pixel_brightness.within(&nominal.pixel_brightness)),
            ("subtended_line_cap", self.subtended_line_cap <= nominal.subtended_line_cap),
            ("subtended_line_ratio", self.subtended_line_ratio <= nominal.subtended_line_ratio),
            ("broken_lines", self.broken_lines.within(&nominal.broken_lines)),
            ("flares", self.flares.within(&nominal.flares)),
            ("flare_position", self.flare_position.within(&nominal.flare_position)),
            ("flare_radius", self.flare_radius.within(&nominal.flare_radius)),
            ("flare_brightness", self.flare_brightness.within(&nominal.flare_brightness)),
            ("glare_brightness", self.glare_brightness.within(&nominal.glare_brightness)),
            ("glare_radius", self.glare_radius.within(&nominal.glare_radius)),
            ("vignetting_e0", self.vignetting_e0.within(&nominal.vignetting_e0)),
            ("blur_size", self.blur_size.within(&nominal.blur_size)),
        ];
        match within.iter().find(|(_, ok)| !ok) {
            Some((name, _)) => Err(Error::invalid(format!(
                "{name} widens the nominal bounds; pass the unsafe-ranges flag to allow it"
            ))),
            None => Ok(()),
        }
    }

    /// Cap on subtended-line brightness for a hot pixel of brightness `b`.
    pub fn line_brightness_cap(&self, b: u8) -> u8 {
        (self.subtended_line_ratio * b as f64)
            .floor()
            .min(self.subtended_line_cap as f64)
            .max(0.0) as u8
    }
}

/// Explicitly requested values that replace random draws. Exact values are
/// checked against physical limits only, not against the sampling ranges.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamOverrides {
    pub sensor: Option<SensorArchitecture>,
    pub direction: Option<LineDirection>,
    pub dust_grains: Option<usize>,
    pub broken_pixels: Option<usize>,
    pub broken_lines: Option<usize>,
    /// How many of the broken lines are white; the rest are black.
    pub white_lines: Option<usize>,
    pub flares: Option<Vec<FlareSpec>>,
    pub glare: Option<bool>,
    pub vignetting_e0: Option<u8>,
    pub blur_size: Option<usize>,
}

/// A flare requested by index with explicit placement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlareSpec {
    pub index: u8,
    pub position: f64,
    pub radius: f64,
    pub brightness: f64,
}

// ---------------------------------------------------------------------------
// Realized parameters

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlacedGrain {
    pub x: i64,
    pub y: i64,
    #[serde(flatten)]
    pub shape: GrainParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DustParams {
    pub count: usize,
    pub grains: Vec<PlacedGrain>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DefectPixel {
    pub x: usize,
    pub y: usize,
    pub brightness: u8,
    /// Offset of the subtended readout line; present on CCDs only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line_brightness: Option<u8>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrokenPixelParams {
    pub sensor: SensorArchitecture,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<LineDirection>,
    pub count: usize,
    pub pixels: Vec<DefectPixel>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BrokenLine {
    pub orientation: LineOrientation,
    pub index: usize,
    pub polarity: Polarity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrokenLineParams {
    pub sensor: SensorArchitecture,
    pub count: usize,
    pub lines: Vec<BrokenLine>,
}

impl BrokenLineParams {
    pub fn white_count(&self) -> usize {
        self.lines.iter().filter(|l| l.polarity == Polarity::White).count()
    }

    pub fn black_count(&self) -> usize {
        self.lines.len() - self.white_count()
    }

    pub fn has_mixed_orientation(&self) -> bool {
        let rows = self.lines.iter().any(|l| l.orientation == LineOrientation::Row);
        let cols = self.lines.iter().any(|l| l.orientation == LineOrientation::Column);
        rows && cols
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlarePlacement {
    pub index: u8,
    pub group: FlareGroup,
    /// Coordinate on the source-to-center line: source 0, image center 1.
    pub position: f64,
    /// Fraction of the image width.
    pub radius: f64,
    pub brightness: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlarePlacement {
    pub index: u8,
    pub radius: f64,
    pub brightness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StraylightParams {
    /// Light source position `[u, v]` in pixels.
    pub sun: [f64; 2],
    pub count: usize,
    pub flares: Vec<FlarePlacement>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub glare: Option<GlarePlacement>,
    /// Set when the source sits on the image center and the flare axis had
    /// to be drawn at random (radians from the +u axis).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degenerate_axis_angle: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VignettingParams {
    pub e0: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlurParams {
    pub size: usize,
}

/// Everything injected into one sample; `None` for disabled classes.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FaultParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dust: Option<DustParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub broken_pixels: Option<BrokenPixelParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub broken_lines: Option<BrokenLineParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub straylight: Option<StraylightParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vignetting: Option<VignettingParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optics_degradation: Option<BlurParams>,
}

impl FaultParams {
    pub fn flags(&self) -> FaultFlags {
        FaultFlags {
            dust: self.dust.is_some(),
            broken_pixels: self.broken_pixels.is_some(),
            broken_lines: self.broken_lines.is_some(),
            vignetting: self.vignetting.is_some(),
            optics_degradation: self.optics_degradation.is_some(),
            straylight: self.straylight.is_some(),
        }
    }
}
