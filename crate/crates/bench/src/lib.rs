//! Fixtures shared by the criterion benchmarks.

use ringscore_core::{render_shot, render_target, RgbImage, ShotSpec, TargetSpec};

pub const WIDTH: usize = 1280;
pub const HEIGHT: usize = 960;

/// Default ten-ring face centered in a 1280×960 frame.
pub fn face() -> TargetSpec {
    TargetSpec::standard((640.0, 480.0), 400.0)
}

/// Bare face and the same face with one arrow.
pub fn frame_pair() -> (TargetSpec, RgbImage, RgbImage) {
    let spec = face();
    let prev = render_target(&spec, WIDTH, HEIGHT, 1).expect("face fits");
    let curr = render_shot(&prev, &spec, &ShotSpec::new((700.0, 430.0), 0.6)).expect("shot fits");
    (spec, prev, curr)
}
