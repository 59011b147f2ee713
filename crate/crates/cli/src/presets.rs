//! Built-in scenarios used by the acceptance suite and shipped as JSON files.

use ringscore_core::TargetSpec;

use crate::config::{Params, ScoringMode};
use crate::scenario::{
    Scenario, ScenarioCamera, ShaftStyle, ShotGenerator, ShotSource, SCENARIO_VERSION,
};

pub const WIDTH: usize = 1280;
pub const HEIGHT: usize = 960;

fn face(tilt: f64, noise_sigma: f64) -> TargetSpec {
    TargetSpec {
        tilt,
        noise_sigma,
        ..TargetSpec::standard((640.0, 480.0), 400.0)
    }
}

fn camera(id: &str, target: TargetSpec) -> ScenarioCamera {
    ScenarioCamera {
        id: id.to_string(),
        target,
    }
}

fn scenario(
    name: &str,
    seed: u64,
    cameras: Vec<ScenarioCamera>,
    generator: ShotGenerator,
) -> Scenario {
    Scenario {
        version: SCENARIO_VERSION,
        name: name.to_string(),
        width: WIDTH,
        height: HEIGHT,
        seed,
        cameras,
        rings: Default::default(),
        params: Params::default(),
        scoring_mode: ScoringMode::Masks,
        shots_per_end: 10,
        brightness_jitter: 0.0,
        shaft: ShaftStyle::default(),
        shots: ShotSource::Generate(generator),
    }
}

/// Fronto-parallel, noiseless, tips at least 3 px from every boundary.
pub fn easy(count: usize) -> Scenario {
    scenario(
        "easy",
        101,
        vec![camera("side", face(0.0, 0.0))],
        ShotGenerator {
            count,
            min_boundary_margin: 3.0,
            ..Default::default()
        },
    )
}

/// Pixel noise of 8 levels and a per-frame brightness offset of up to ±10.
/// The change threshold is raised above the frame-to-frame noise floor.
pub fn noisy(count: usize) -> Scenario {
    let mut s = scenario(
        "noisy",
        202,
        vec![camera("side", face(0.0, 8.0))],
        ShotGenerator {
            count,
            ..Default::default()
        },
    );
    s.brightness_jitter = 10.0;
    s.params.diff_threshold = 150;
    s
}

/// Two fronto-parallel cameras, sixteen easy trials.
pub fn two_camera() -> Scenario {
    let top = TargetSpec::standard((650.0, 470.0), 380.0);
    scenario(
        "two_camera",
        303,
        vec![camera("side", face(0.0, 0.0)), camera("top", top)],
        ShotGenerator {
            count: 16,
            min_boundary_margin: 3.0,
            ..Default::default()
        },
    )
}

/// One fronto-parallel camera and one viewing the face at about 15°.
pub fn dual(count: usize) -> Scenario {
    scenario(
        "dual",
        404,
        vec![
            camera("side", face(0.0, 0.0)),
            camera("top", face(0.26, 0.0)),
        ],
        ShotGenerator {
            count,
            ..Default::default()
        },
    )
}

/// A single camera viewing the face at about 10°.
pub fn tilted(count: usize) -> Scenario {
    scenario(
        "tilted",
        505,
        vec![camera("side", face(0.17, 0.0))],
        ShotGenerator {
            count,
            ..Default::default()
        },
    )
}

pub fn all() -> Vec<Scenario> {
    vec![easy(200), noisy(200), two_camera(), dual(50), tilted(500)]
}
