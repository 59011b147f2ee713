use std::path::Path;

use crate::calibration::{calibrate_camera, CalibrationFile, CALIBRATION_VERSION};
use crate::config::Config;
use crate::error::CliError;

use super::{config_dir, read_ppm};

/// Detects every target in each camera's first frame.
pub fn calibrate(config: &Config, base: &Path) -> Result<CalibrationFile, CliError> {
    let detection = config.params.detection(&config.rings);
    let frames = config.resolved_frames(base);
    let mut cameras = Vec::with_capacity(config.cameras.len());
    for (cam, paths) in config.cameras.iter().zip(&frames) {
        let first = paths
            .first()
            .ok_or_else(|| CliError::Usage(format!("camera {:?} has no frames", cam.id)))?;
        let image = read_ppm(first)?;
        let (record, _) = calibrate_camera(&cam.id, &image, &cam.hints, &detection)?;
        cameras.push(record);
    }
    Ok(CalibrationFile {
        version: CALIBRATION_VERSION,
        mask_expand: config.params.mask_expand,
        cameras,
    })
}

pub fn summary(cal: &CalibrationFile) -> String {
    let mut out = String::new();
    for cam in &cal.cameras {
        for (i, t) in cam.targets.iter().enumerate() {
            out.push_str(&format!(
                "camera {} target {}: {} rings\n",
                cam.id,
                i,
                t.rings.len()
            ));
        }
    }
    out
}

pub fn run(config_path: &Path, out: &Path) -> Result<String, CliError> {
    let config = Config::load(config_path)?;
    let cal = calibrate(&config, config_dir(config_path))?;
    super::write_text(out, &cal.to_json())?;
    Ok(summary(&cal))
}
