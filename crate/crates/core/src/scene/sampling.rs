//! Two-stage stratified sampling of the scenario variables.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_6, TAU};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::frames::{attitude_rotation, project_sun, sun_aligned_frame, sun_direction, SunPixel};
use crate::camera::CameraModel;
use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// Sun-facing attitudes may leave the Sun this far outside the raster
/// (fraction of width/height per side).
pub const SUN_FACING_MARGIN: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    SunFacing,
    SunAverted,
}

/// One sampled scenario. Angles in radians; position in dimensionless
/// Local-Level patch coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetVariables {
    pub stage: Stage,
    pub sun_azimuth: f64,
    pub sun_elevation: f64,
    pub roll: f64,
    pub pitch: f64,
    pub yaw: f64,
    pub position: [f64; 3],
}

/// Open interval `(lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }

    fn draw(&self, rng: &mut SeededRng) -> f64 {
        rng.open_uniform(self.lo, self.hi)
    }
}

/// Per-stage sampling bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageBounds {
    pub sun_azimuth: Interval,
    pub sun_elevation: Interval,
    pub roll: Interval,
    pub pitch: Interval,
    pub yaw: Interval,
    pub x: Interval,
    pub y: Interval,
    pub z: Interval,
}

impl StageBounds {
    pub fn for_stage(stage: Stage, cam: &CameraModel) -> Self {
        let half = cam.half_fov_rad();
        let (elevation, attitude) = match stage {
            Stage::SunFacing => (Interval::new(-FRAC_PI_6, FRAC_PI_6), Interval::new(-half, half)),
            Stage::SunAverted => (
                Interval::new(-FRAC_PI_6, FRAC_PI_2),
                Interval::new(half, TAU - half),
            ),
        };
        Self {
            sun_azimuth: Interval::new(0.0, TAU),
            sun_elevation: elevation,
            roll: attitude,
            pitch: attitude,
            yaw: Interval::new(0.0, TAU),
            x: Interval::new(-150.0, 150.0),
            y: Interval::new(-150.0, 150.0),
            z: Interval::new(0.0, 100.0),
        }
    }

    /// Name of the first field outside its interval, if any.
    pub fn violation(&self, v: &DatasetVariables) -> Option<&'static str> {
        let checks = [
            ("sun_azimuth", self.sun_azimuth, v.sun_azimuth),
            ("sun_elevation", self.sun_elevation, v.sun_elevation),
            ("roll", self.roll, v.roll),
            ("pitch", self.pitch, v.pitch),
            ("yaw", self.yaw, v.yaw),
            ("position.x", self.x, v.position[0]),
            ("position.y", self.y, v.position[1]),
            ("position.z", self.z, v.position[2]),
        ];
        checks
            .into_iter()
            .find(|(_, interval, value)| !interval.contains(*value))
            .map(|(name, _, _)| name)
    }
}

impl DatasetVariables {
    pub fn sun_dir_local(&self) -> Vector3<f64> {
        sun_direction(self.sun_azimuth, self.sun_elevation)
    }

    /// Sun direction in the camera frame. Depends on roll and pitch only.
    pub fn sun_dir_camera(&self) -> Vector3<f64> {
        self.local_to_camera().apply(&self.sun_dir_local())
    }

    pub fn local_to_camera(&self) -> super::frames::FrameRotation {
        sun_aligned_frame(&self.sun_dir_local())
            .then(&attitude_rotation(self.roll, self.pitch, self.yaw))
    }

    pub fn sun_pixel(&self, cam: &CameraModel) -> SunPixel {
        project_sun(&self.sun_dir_camera().normalize(), cam)
            .expect("rotation of a unit vector stays unit")
    }

    pub fn validate(&self, cam: &CameraModel) -> Result<()> {
        match StageBounds::for_stage(self.stage, cam).violation(self) {
            Some(field) => Err(Error::invalid(format!(
                "{field} outside its {:?} bounds",
                self.stage
            ))),
            None => Ok(()),
        }
    }
}

/// Does this attitude satisfy the stage's Sun-visibility requirement?
pub fn stage_geometry_ok(stage: Stage, sun: &SunPixel, cam: &CameraModel) -> bool {
    match stage {
        Stage::SunFacing => sun.within_margin(cam, SUN_FACING_MARGIN),
        Stage::SunAverted => !sun.in_fov,
    }
}

/// Draws every field uniformly from its stage interval. Roll and pitch are
/// redrawn together until the Sun lands near the raster (facing) or off it
/// (averted); the other fields are never redrawn.
pub fn sample_variables(stage: Stage, cam: &CameraModel, rng: &mut SeededRng) -> DatasetVariables {
    let b = StageBounds::for_stage(stage, cam);
    let mut v = DatasetVariables {
        stage,
        sun_azimuth: b.sun_azimuth.draw(rng),
        sun_elevation: b.sun_elevation.draw(rng),
        roll: 0.0,
        pitch: 0.0,
        yaw: b.yaw.draw(rng),
        position: [b.x.draw(rng), b.y.draw(rng), b.z.draw(rng)],
    };
    loop {
        v.roll = b.roll.draw(rng);
        v.pitch = b.pitch.draw(rng);
        if stage_geometry_ok(stage, &v.sun_pixel(cam), cam) {
            return v;
        }
    }
}

/// First `n_facing` entries Sun-facing, the rest Sun-averted.
pub fn plan_from_count(n_total: usize, n_facing: usize) -> Vec<Stage> {
    let n_facing = n_facing.min(n_total);
    let mut plan = vec![Stage::SunFacing; n_facing];
    plan.resize(n_total, Stage::SunAverted);
    plan
}

pub fn stratified_plan(n_total: usize, straylight_fraction: f64) -> Result<Vec<Stage>> {
    if !(0.0..=1.0).contains(&straylight_fraction) {
        return Err(Error::invalid(format!(
            "straylight_fraction must lie in [0, 1], got {straylight_fraction}"
        )));
    }
    let n_facing = (n_total as f64 * straylight_fraction).round() as usize;
    Ok(plan_from_count(n_total, n_facing))
}

/// Angle between boresight and Sun.
pub fn sun_off_axis(v: &DatasetVariables) -> f64 {
    let d = v.sun_dir_camera();
    d.z.clamp(-1.0, 1.0).acos()
}
