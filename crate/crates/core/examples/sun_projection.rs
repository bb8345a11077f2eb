//! Sun-facing and Sun-averted attitudes and where the Sun lands on the raster.

use faultsim::scene::{sample_variables, Stage};
use faultsim::{CameraModel, SeededRng};

fn main() {
    let cam = CameraModel::standard();
    let mut rng = SeededRng::new(42);
    for stage in [Stage::SunFacing, Stage::SunAverted] {
        for _ in 0..3 {
            let v = sample_variables(stage, &cam, &mut rng);
            let s = v.sun_pixel(&cam);
            println!(
                "{stage:?}: roll {:+.3} pitch {:+.3} yaw {:+.3} -> sun ({:.1}, {:.1}) in_fov={} behind={}",
                v.roll, v.pitch, v.yaw, s.u, s.v, s.in_fov, s.behind
            );
        }
    }
}
