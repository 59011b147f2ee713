//! Session configuration.

use std::path::{Path, PathBuf};

use ringscore_core::{ArrowParams, DetectionParams, Point, RingConfig};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ScoringMode {
    #[default]
    Masks,
    Rectified,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Params {
    pub diff_threshold: u16,
    pub canny_low: f64,
    pub canny_high: f64,
    pub sigma_space: f64,
    pub sigma_range: f64,
    pub center_gate: f64,
    pub mask_expand: f64,
    pub arrow_se_height: usize,
    pub min_ring_fraction: f64,
    pub ring_merge_tol: f64,
}

impl Default for Params {
    fn default() -> Self {
        let d = DetectionParams::default();
        let a = ArrowParams::default();
        Self {
            diff_threshold: a.diff_threshold,
            canny_low: d.canny_low,
            canny_high: d.canny_high,
            sigma_space: d.sigma_space,
            sigma_range: d.sigma_range,
            center_gate: d.center_gate,
            mask_expand: d.mask_expand,
            arrow_se_height: a.arrow_se_height,
            min_ring_fraction: d.min_ring_fraction,
            ring_merge_tol: d.ring_merge_tol,
        }
    }
}

impl Params {
    pub fn detection(&self, rings: &RingConfig) -> DetectionParams {
        DetectionParams {
            canny_low: self.canny_low,
            canny_high: self.canny_high,
            sigma_space: self.sigma_space,
            sigma_range: self.sigma_range,
            center_gate: self.center_gate,
            mask_expand: self.mask_expand,
            min_ring_fraction: self.min_ring_fraction,
            ring_merge_tol: self.ring_merge_tol,
            rings: rings.clone(),
        }
    }

    pub fn arrow(&self) -> ArrowParams {
        ArrowParams {
            diff_threshold: self.diff_threshold,
            arrow_se_height: self.arrow_se_height,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CameraConfig {
    pub id: String,
    /// Frame sequence in shot order; the first frame is the calibration view.
    /// Relative paths resolve against the config file's directory.
    pub frames: Vec<PathBuf>,
    /// One center per target, in pixels.
    pub hints: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub version: u32,
    pub cameras: Vec<CameraConfig>,
    #[serde(default = "default_players")]
    pub players: Vec<String>,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub rings: RingConfig,
    #[serde(default)]
    pub scoring_mode: ScoringMode,
}

fn default_players() -> Vec<String> {
    vec!["player1".to_string()]
}

impl Config {
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.version != CONFIG_VERSION {
            return bad(format!("unsupported config version {}", self.version));
        }
        if self.cameras.is_empty() {
            return bad("at least one camera is required".into());
        }
        for (i, c) in self.cameras.iter().enumerate() {
            if self.cameras[..i].iter().any(|o| o.id == c.id) {
                return bad(format!("duplicate camera id {:?}", c.id));
            }
            if c.hints.is_empty() {
                return Err(CliError::Usage(format!(
                    "camera {:?} has no target hints",
                    c.id
                )));
            }
        }
        if self.players.is_empty() {
            return bad("at least one player is required".into());
        }
        self.params
            .detection(&self.rings)
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let c: Config = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Frame paths of every camera resolved against `base`.
    pub fn resolved_frames(&self, base: &Path) -> Vec<Vec<PathBuf>> {
        self.cameras
            .iter()
            .map(|c| c.frames.iter().map(|f| base.join(f)).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Config {
        Config {
            version: CONFIG_VERSION,
            cameras: vec![CameraConfig {
                id: "side".into(),
                frames: vec!["a.ppm".into(), "b.ppm".into()],
                hints: vec![(640.0, 480.0)],
            }],
            players: vec!["ann".into(), "bo".into()],
            params: Params::default(),
            rings: RingConfig::default(),
            scoring_mode: ScoringMode::Rectified,
        }
    }

    #[test]
    fn round_trip() {
        let c = sample();
        assert_eq!(Config::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn defaults_fill_in() {
        let c = Config::from_json(
            r#"{"version":1,"cameras":[{"id":"a","frames":[],"hints":[[1,2]]}]}"#,
        )
        .unwrap();
        assert_eq!(c.params, Params::default());
        assert_eq!(c.params.diff_threshold, 40);
        assert_eq!(c.params.center_gate, 100.0);
        assert_eq!(c.params.mask_expand, 50.0);
        assert_eq!(c.rings.values, (1..=10).collect::<Vec<_>>());
        assert_eq!(c.scoring_mode, ScoringMode::Masks);
        assert_eq!(c.players, vec!["player1"]);
    }

    #[test]
    fn validation_errors() {
        let mut c = sample();
        c.cameras[0].hints.clear();
        assert!(matches!(c.validate(), Err(CliError::Usage(_))));
        let mut c = sample();
        c.params.canny_low = 500.0;
        assert!(matches!(c.validate(), Err(CliError::Config(_))));
        let mut c = sample();
        c.rings.values = vec![3, 2, 1, 4, 5, 6, 7, 8, 9, 10];
        assert!(c.validate().is_err());
        let mut c = sample();
        c.version = 9;
        assert!(c.validate().is_err());
    }
}
