//! Synthetic scenarios: target faces per camera, shot plans and frame
//! rendering.
//!
//! Shots are planned on a normalized face: `offset` is the tip's position
//! relative to the face center in units of the outer radius, so every camera
//! sees the same physical hit on its own rendering of the face.
//!
//! Frames are grouped in ends. Each end starts from a fresh face (frame 0,
//! used for calibration) and adds one arrow per frame; arrows stay in place
//! until the end is over. Every frame of every camera gets its own noise
//! seed, derived from the scenario seed with [`frame_seed`].

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ringscore_core::synth::{add_noise, paint_target, SHAFT_GREEN};
use ringscore_core::{
    render_shot, true_score, Point, Rgb, RgbImage, RingConfig, ShotSpec, TargetSpec,
};
use serde::{Deserialize, Serialize};

use crate::config::{Params, ScoringMode};
use crate::error::CliError;

pub const SCENARIO_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ShaftStyle {
    pub length: f64,
    pub width: f64,
    pub color: Rgb,
}

impl Default for ShaftStyle {
    fn default() -> Self {
        Self {
            length: 60.0,
            width: 3.0,
            color: SHAFT_GREEN,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioCamera {
    pub id: String,
    pub target: TargetSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlannedShot {
    /// Tip position relative to the face center, in outer radii.
    pub offset: Point,
    /// Radians from straight down.
    pub shaft_angle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ShotGenerator {
    pub count: usize,
    /// Minimum tip distance from any ring boundary, in pixels of the first
    /// camera's face.
    pub min_boundary_margin: f64,
    /// Tips are drawn uniformly from the disk of this many outer radii.
    pub max_radius: f64,
    /// Largest shaft deviation from vertical, radians.
    pub max_shaft_angle: f64,
    /// Minimum gap between shafts within one end, pixels.
    pub min_separation: f64,
}

impl Default for ShotGenerator {
    fn default() -> Self {
        Self {
            count: 10,
            min_boundary_margin: 0.0,
            max_radius: 1.0,
            max_shaft_angle: 0.1,
            min_separation: 8.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShotSource {
    Generate(ShotGenerator),
    List(Vec<PlannedShot>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub version: u32,
    #[serde(default)]
    pub name: String,
    pub width: usize,
    pub height: usize,
    #[serde(default)]
    pub seed: u64,
    pub cameras: Vec<ScenarioCamera>,
    #[serde(default)]
    pub rings: RingConfig,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub scoring_mode: ScoringMode,
    #[serde(default = "default_shots_per_end")]
    pub shots_per_end: usize,
    /// Per-frame brightness offset is uniform in `[-jitter, jitter]`.
    #[serde(default)]
    pub brightness_jitter: f64,
    #[serde(default)]
    pub shaft: ShaftStyle,
    pub shots: ShotSource,
}

fn default_shots_per_end() -> usize {
    10
}

/// One planned shot with its ground truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthShot {
    pub index: usize,
    pub end: usize,
    pub offset: Point,
    /// Tip in the first camera's unwarped face plane, pixels.
    pub tip: Point,
    pub shaft_angle: f64,
    pub true_score: u32,
    /// Tip distance to the nearest ring boundary on the first camera's face.
    pub boundary_distance: f64,
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Noise seed of one frame: SplitMix64 chained over seed, end, frame and
/// camera index.
pub fn frame_seed(seed: u64, end: usize, frame: usize, camera: usize) -> u64 {
    mix(mix(mix(mix(seed) ^ end as u64) ^ frame as u64) ^ camera as u64)
}

const GENERATOR_STREAM: u64 = 0x005E_ED0F_5A0F;
const BRIGHTNESS_STREAM: u64 = 0xB416_4755;

fn dist(a: Point, b: Point) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

fn segment_gap(a0: Point, a1: Point, b0: Point, b1: Point) -> f64 {
    // Dense sampling is plenty for 60 px shafts.
    let steps = 64;
    let mut best = f64::INFINITY;
    for i in 0..=steps {
        let t = i as f64 / steps as f64;
        let p = (a0.0 + (a1.0 - a0.0) * t, a0.1 + (a1.1 - a0.1) * t);
        for j in 0..=steps {
            let s = j as f64 / steps as f64;
            let q = (b0.0 + (b1.0 - b0.0) * s, b0.1 + (b1.1 - b0.1) * s);
            best = best.min(dist(p, q));
        }
    }
    best
}

impl Scenario {
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.version != SCENARIO_VERSION {
            return bad(format!("unsupported scenario version {}", self.version));
        }
        if self.cameras.is_empty() {
            return bad("scenario needs at least one camera".into());
        }
        if self.shots_per_end == 0 {
            return bad("shots_per_end must be positive".into());
        }
        if self.brightness_jitter.is_nan() || self.brightness_jitter < 0.0 {
            return bad("brightness_jitter must be >= 0".into());
        }
        self.rings.validate().map_err(CliError::Config)?;
        let ratios: Vec<f64> = self.rings.radii_ratios.iter().rev().copied().collect();
        for c in &self.cameras {
            c.target
                .validate()
                .map_err(|e| CliError::Config(format!("camera {:?}: {e}", c.id)))?;
            if c.target.ring_radii_ratios != ratios {
                return bad(format!(
                    "camera {:?}: face ratios differ from the ring config",
                    c.id
                ));
            }
        }
        if let ShotSource::Generate(g) = &self.shots {
            if !(g.max_radius > 0.0 && g.max_shaft_angle >= 0.0 && g.min_boundary_margin >= 0.0) {
                return bad("invalid shot generator settings".into());
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let s: Scenario =
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    fn reference(&self) -> &TargetSpec {
        &self.cameras[0].target
    }

    /// Ring values innermost first, parallel to the face ratios.
    pub fn face_values(&self) -> Vec<u32> {
        self.rings.values.iter().rev().copied().collect()
    }

    /// Target-plane tip of `shot` on camera `camera`'s face.
    pub fn plane_tip(&self, camera: usize, shot: &PlannedShot) -> Point {
        let t = &self.cameras[camera].target;
        (
            t.center.0 + t.outer_radius * shot.offset.0,
            t.center.1 + t.outer_radius * shot.offset.1,
        )
    }

    pub fn shot_spec(&self, camera: usize, shot: &PlannedShot) -> ShotSpec {
        ShotSpec {
            true_tip: self.plane_tip(camera, shot),
            shaft_angle: shot.shaft_angle,
            shaft_length: self.shaft.length,
            shaft_width: self.shaft.width,
            shaft_color: self.shaft.color,
        }
    }

    /// The shot list with `count` (if given) overriding the generator's.
    pub fn plan(&self, seed: u64, count: Option<usize>) -> Result<Vec<PlannedShot>, CliError> {
        match &self.shots {
            ShotSource::List(list) => Ok(match count {
                Some(n) => list.iter().copied().take(n).collect(),
                None => list.clone(),
            }),
            ShotSource::Generate(g) => {
                let g = ShotGenerator {
                    count: count.unwrap_or(g.count),
                    ..g.clone()
                };
                self.generate(&g, seed)
            }
        }
    }

    fn generate(&self, g: &ShotGenerator, seed: u64) -> Result<Vec<PlannedShot>, CliError> {
        const MAX_ATTEMPTS: usize = 100_000;
        let spec = self.reference();
        let r = spec.outer_radius;
        let mut rng = ChaCha8Rng::seed_from_u64(mix(seed ^ GENERATOR_STREAM));
        let mut out: Vec<PlannedShot> = Vec::with_capacity(g.count);
        let mut end_shafts: Vec<(Point, Point)> = Vec::new();
        let mut attempts = 0;
        while out.len() < g.count {
            attempts += 1;
            if attempts > MAX_ATTEMPTS {
                return Err(CliError::Config(format!(
                    "could not place shot {} within an end of {}",
                    out.len(),
                    self.shots_per_end
                )));
            }
            if out.len().is_multiple_of(self.shots_per_end) {
                end_shafts.clear();
            }
            let rad = r * g.max_radius * rng.random::<f64>().sqrt();
            let phi = rng.random::<f64>() * std::f64::consts::TAU;
            let (u, v) = (rad * phi.cos(), rad * phi.sin());
            let tip = (spec.center.0 + u, spec.center.1 + v);
            let skew = rng.random_range(-1.0..=1.0) * g.max_shaft_angle;
            let angle = if v >= 0.0 {
                skew
            } else {
                std::f64::consts::PI + skew
            };
            if spec.boundary_distance(tip) < g.min_boundary_margin {
                continue;
            }
            let dir = (angle.sin(), angle.cos());
            if u * dir.0 + v * dir.1 < 0.0 {
                continue;
            }
            let tail = (
                tip.0 + dir.0 * self.shaft.length,
                tip.1 + dir.1 * self.shaft.length,
            );
            let clear = end_shafts
                .iter()
                .all(|&(a, b)| segment_gap(tip, tail, a, b) >= self.shaft.width + g.min_separation);
            if !clear {
                continue;
            }
            attempts = 0;
            end_shafts.push((tip, tail));
            out.push(PlannedShot {
                offset: (u / r, v / r),
                shaft_angle: angle,
            });
        }
        Ok(out)
    }

    pub fn truth(&self, plan: &[PlannedShot]) -> Vec<TruthShot> {
        let values = self.face_values();
        plan.iter()
            .enumerate()
            .map(|(i, s)| {
                let tip = self.plane_tip(0, s);
                TruthShot {
                    index: i,
                    end: i / self.shots_per_end,
                    offset: s.offset,
                    tip,
                    shaft_angle: s.shaft_angle,
                    true_score: true_score(self.reference(), tip, &values),
                    boundary_distance: self.reference().boundary_distance(tip),
                }
            })
            .collect()
    }

    /// Per-frame brightness offset for the given frame seed.
    pub fn brightness(&self, seed: u64) -> i32 {
        if self.brightness_jitter <= 0.0 {
            return 0;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(mix(seed ^ BRIGHTNESS_STREAM));
        rng.random_range(-self.brightness_jitter..=self.brightness_jitter)
            .round() as i32
    }
}

/// Renders the frames of one end for one camera: frame 0 is the bare face,
/// frame k carries the first k shots.
pub struct EndRenderer<'a> {
    scenario: &'a Scenario,
    camera: usize,
    end: usize,
    seed: u64,
    canvas: RgbImage,
    frame: usize,
}

impl<'a> EndRenderer<'a> {
    pub fn new(
        scenario: &'a Scenario,
        camera: usize,
        end: usize,
        seed: u64,
    ) -> Result<Self, CliError> {
        let spec = &scenario.cameras[camera].target;
        let mut canvas = RgbImage::filled(scenario.width, scenario.height, spec.background);
        paint_target(&mut canvas, spec)
            .map_err(|e| CliError::Config(format!("camera {camera}: {e}")))?;
        Ok(Self {
            scenario,
            camera,
            end,
            seed,
            canvas,
            frame: 0,
        })
    }

    fn noisy(&self) -> RgbImage {
        let s = frame_seed(self.seed, self.end, self.frame, self.camera);
        let sigma = self.scenario.cameras[self.camera].target.noise_sigma;
        add_noise(&self.canvas, sigma, self.scenario.brightness(s), s)
    }

    /// The calibration frame.
    pub fn first(&self) -> RgbImage {
        self.noisy()
    }

    /// Adds `shot` and returns the next frame.
    pub fn add(&mut self, shot: &PlannedShot) -> Result<RgbImage, CliError> {
        let spec = &self.scenario.cameras[self.camera].target;
        self.canvas = render_shot(
            &self.canvas,
            spec,
            &self.scenario.shot_spec(self.camera, shot),
        )
        .map_err(|e| CliError::Config(format!("shot out of frame: {e}")))?;
        self.frame += 1;
        Ok(self.noisy())
    }
}
