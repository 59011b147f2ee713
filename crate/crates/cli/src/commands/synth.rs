use std::path::{Path, PathBuf};

use ringscore_core::{save_ppm, TargetSpec};
use serde::{Deserialize, Serialize};

use crate::config::{CameraConfig, Config, CONFIG_VERSION};
use crate::error::CliError;
use crate::scenario::{EndRenderer, Scenario, TruthShot};

use super::write_text;

pub const GROUND_TRUTH_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthCamera {
    pub id: String,
    pub target: TargetSpec,
    pub frames: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub version: u32,
    pub scenario: String,
    pub seed: u64,
    pub width: usize,
    pub height: usize,
    pub cameras: Vec<TruthCamera>,
    pub shots: Vec<TruthShot>,
}

/// Renders one uninterrupted sequence: the bare face followed by one frame
/// per shot, with every arrow left in place. Writes PPM frames under
/// `<out>/<camera id>/`, `ground_truth.json` and a `config.json` that
/// `score` can run directly.
pub fn synthesize(
    scenario: &Scenario,
    seed: u64,
    trials: Option<usize>,
    out: &Path,
) -> Result<GroundTruth, CliError> {
    scenario.validate()?;
    let count = match &scenario.shots {
        crate::scenario::ShotSource::Generate(g) => trials.unwrap_or(g.count),
        crate::scenario::ShotSource::List(l) => trials.unwrap_or(l.len()).min(l.len()),
    };
    let mut single = scenario.clone();
    single.shots_per_end = count.max(1);
    let plan = single.plan(seed, Some(count))?;
    let shots = single.truth(&plan);
    let mut cameras = Vec::new();
    for (k, cam) in single.cameras.iter().enumerate() {
        let dir = out.join(&cam.id);
        std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        let mut renderer = EndRenderer::new(&single, k, 0, seed)?;
        let mut frames = Vec::with_capacity(plan.len() + 1);
        let mut write = |i: usize, img: &ringscore_core::RgbImage| -> Result<(), CliError> {
            let rel = PathBuf::from(&cam.id).join(format!("frame_{i:03}.ppm"));
            let path = out.join(&rel);
            std::fs::write(&path, save_ppm(img)).map_err(|e| CliError::io(&path, e))?;
            frames.push(rel);
            Ok(())
        };
        write(0, &renderer.first())?;
        for (i, shot) in plan.iter().enumerate() {
            let img = renderer.add(shot)?;
            write(i + 1, &img)?;
        }
        cameras.push(TruthCamera {
            id: cam.id.clone(),
            target: cam.target.clone(),
            frames,
        });
    }
    let truth = GroundTruth {
        version: GROUND_TRUTH_VERSION,
        scenario: scenario.name.clone(),
        seed,
        width: scenario.width,
        height: scenario.height,
        cameras,
        shots,
    };
    let config = Config {
        version: CONFIG_VERSION,
        cameras: truth
            .cameras
            .iter()
            .map(|c| CameraConfig {
                id: c.id.clone(),
                frames: c.frames.clone(),
                hints: vec![c.target.center],
            })
            .collect(),
        players: vec!["player1".into()],
        params: scenario.params.clone(),
        rings: scenario.rings.clone(),
        scoring_mode: scenario.scoring_mode,
    };
    write_text(
        &out.join("ground_truth.json"),
        &serde_json::to_string_pretty(&truth).expect("ground truth serializes"),
    )?;
    write_text(&out.join("config.json"), &config.to_json())?;
    Ok(truth)
}

pub fn run(
    scenario_path: &Path,
    seed: Option<u64>,
    trials: Option<usize>,
    out: &Path,
) -> Result<String, CliError> {
    let scenario = Scenario::load(scenario_path)?;
    let truth = synthesize(&scenario, seed.unwrap_or(scenario.seed), trials, out)?;
    Ok(format!(
        "wrote {} frames per camera for {} camera(s) to {}\n",
        truth.shots.len() + 1,
        truth.cameras.len(),
        out.display()
    ))
}
