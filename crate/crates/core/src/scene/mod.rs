//! Scene geometry, scenario sampling and background rendering.

pub mod background;
pub mod frames;
pub mod sampling;

pub use background::{render_background, BackgroundProvider, ImportedBackgrounds, ProceduralBackground};
pub use frames::{attitude_rotation, project_sun, sun_aligned_frame, sun_direction, FrameRotation, SunPixel};
pub use sampling::{plan_from_count, sample_variables, stratified_plan, DatasetVariables, Stage};
