//! Per-shot scoring across cameras.

use ringscore_core::rectify::RectifiedTarget;
use ringscore_core::{
    detect_arrow, fuse, score_arrow, score_point_rectified, ArrowDetection, ArrowError,
    ArrowParams, CameraScore, RgbImage, RingConfig, ShotFragment, TargetModel,
};
use serde::{Deserialize, Serialize};

use crate::config::ScoringMode;
use crate::error::CliError;

/// A calibrated target ready for scoring in the chosen mode.
#[derive(Debug, Clone)]
pub struct ScoringTarget {
    pub model: TargetModel,
    pub rectified: Option<RectifiedTarget>,
}

impl ScoringTarget {
    pub fn new(
        model: TargetModel,
        mode: ScoringMode,
        rings: &RingConfig,
    ) -> Result<Self, CliError> {
        let rectified = match mode {
            ScoringMode::Masks => None,
            ScoringMode::Rectified => Some(
                RectifiedTarget::projective(&model, rings)
                    .map_err(|e| CliError::Calibration(e.to_string()))?,
            ),
        };
        Ok(Self { model, rectified })
    }
}

/// Calibrated targets of one camera.
#[derive(Debug, Clone)]
pub struct CameraTargets {
    pub id: String,
    pub targets: Vec<ScoringTarget>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CameraDiagnostic {
    pub camera_id: String,
    pub ring_count: usize,
    pub tip: Option<[usize; 2]>,
}

/// Detects the new arrow in every camera and fuses the camera scores.
/// `prev` and `curr` are parallel to `cameras`; `target` selects which of
/// each camera's targets is being shot at.
pub fn score_shot(
    cameras: &[CameraTargets],
    target: usize,
    prev: &[&RgbImage],
    curr: &[&RgbImage],
    params: &ArrowParams,
) -> (ShotFragment, Vec<CameraDiagnostic>) {
    let picked: Vec<&ScoringTarget> = cameras
        .iter()
        .map(|c| &c.targets[target % c.targets.len()])
        .collect();
    let detections: Vec<(String, Result<ArrowDetection, ArrowError>)> = cameras
        .iter()
        .zip(&picked)
        .zip(prev.iter().zip(curr))
        .map(|((cam, t), (p, c))| (cam.id.clone(), detect_arrow(p, c, &t.model, params)))
        .collect();
    let diagnostics = detections
        .iter()
        .zip(&picked)
        .map(|((id, det), t)| CameraDiagnostic {
            camera_id: id.clone(),
            ring_count: t.model.rings.len(),
            tip: det.as_ref().ok().map(|d| [d.tip.0, d.tip.1]),
        })
        .collect();
    let all_masks = picked.iter().all(|t| t.rectified.is_none());
    let fragment = if all_masks {
        let models: Vec<&TargetModel> = picked.iter().map(|t| &t.model).collect();
        score_arrow(&detections, &models)
    } else {
        fuse(
            detections
                .iter()
                .zip(&picked)
                .map(|((id, det), t)| match det {
                    Ok(d) => CameraScore {
                        camera_id: id.clone(),
                        score: Some(match &t.rectified {
                            Some(r) => score_point_rectified(r, d.tip_point()),
                            None => ringscore_core::score_point(&t.model, d.tip_point()),
                        }),
                        error: None,
                    },
                    Err(e) => CameraScore {
                        camera_id: id.clone(),
                        score: None,
                        error: Some(e.to_string()),
                    },
                })
                .collect(),
        )
    };
    (fragment, diagnostics)
}
