//! Calibration artifact: fitted ring geometry per camera and target.

use std::path::Path;

use ringscore_core::{
    detect_all_targets, CalibrationHint, DetectionParams, Point, RgbImage, RingModel, TargetError,
    TargetModel,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const CALIBRATION_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetRecord {
    pub hint: Point,
    /// Outermost first.
    pub rings: Vec<RingModel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CameraCalibration {
    pub id: String,
    pub width: usize,
    pub height: usize,
    pub targets: Vec<TargetRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationFile {
    pub version: u32,
    pub mask_expand: f64,
    pub cameras: Vec<CameraCalibration>,
}

impl CalibrationFile {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("calibration serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let c: CalibrationFile =
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if c.version != CALIBRATION_VERSION {
            return Err(CliError::Config(format!(
                "unsupported calibration version {}",
                c.version
            )));
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }

    /// Rebuilds the target models (with rasterized outer masks) per camera.
    pub fn models(&self) -> Result<Vec<Vec<TargetModel>>, CliError> {
        self.cameras
            .iter()
            .map(|cam| {
                cam.targets
                    .iter()
                    .map(|t| {
                        TargetModel::from_rings(
                            t.hint,
                            t.rings.clone(),
                            self.mask_expand,
                            cam.width,
                            cam.height,
                        )
                        .map_err(|e| CliError::Calibration(format!("camera {:?}: {e}", cam.id)))
                    })
                    .collect()
            })
            .collect()
    }
}

fn describe(camera: &str, e: &TargetError) -> String {
    match e {
        TargetError::NoTargetFound { hint_index } => {
            format!("camera {camera:?}, hint {hint_index}: no target found")
        }
        TargetError::TooFewRings { hint_index } => {
            format!("camera {camera:?}, hint {hint_index}: too few rings")
        }
        other => format!("camera {camera:?}: {other}"),
    }
}

/// Detects every hinted target in one camera's calibration frame.
pub fn calibrate_camera(
    id: &str,
    image: &RgbImage,
    hints: &[Point],
    params: &DetectionParams,
) -> Result<(CameraCalibration, Vec<TargetModel>), CliError> {
    let hint = CalibrationHint {
        camera_id: id.to_string(),
        target_centers: hints.to_vec(),
    };
    let models = detect_all_targets(image, &hint, params).map_err(|e| match e {
        TargetError::BadHint { .. } | TargetError::NoHints => CliError::Usage(describe(id, &e)),
        TargetError::BadParams(_) => CliError::Config(describe(id, &e)),
        _ => CliError::Calibration(describe(id, &e)),
    })?;
    let record = CameraCalibration {
        id: id.to_string(),
        width: image.width(),
        height: image.height(),
        targets: models
            .iter()
            .map(|m| TargetRecord {
                hint: m.center,
                rings: m.rings.clone(),
            })
            .collect(),
    };
    Ok((record, models))
}
