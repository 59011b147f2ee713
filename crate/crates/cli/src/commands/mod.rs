//! Subcommand implementations. Each returns the text to print on success.

pub mod bench;
pub mod calibrate;
pub mod score;
pub mod synth;

use std::path::Path;

use ringscore_core::{load_ppm, RgbImage};

use crate::error::CliError;

pub(crate) fn read_ppm(path: &Path) -> Result<RgbImage, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    load_ppm(&bytes).map_err(|e| CliError::io(path, e))
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub(crate) fn config_dir(path: &Path) -> &Path {
    path.parent().unwrap_or(Path::new(""))
}
