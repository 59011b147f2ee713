use std::path::{Path, PathBuf};

use ringscore_core::{ranking, record_shot, RgbImage, ScoreRecord, Session};
use serde::{Deserialize, Serialize};

use crate::calibration::CalibrationFile;
use crate::config::{Config, ScoringMode};
use crate::error::CliError;
use crate::pipeline::{score_shot, CameraDiagnostic, CameraTargets, ScoringTarget};

use super::{config_dir, read_ppm};

pub const SESSION_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotDiagnostics {
    /// One-based frame index of the shot.
    pub frame: usize,
    pub player: String,
    pub target: usize,
    pub cameras: Vec<CameraDiagnostic>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlayerTotal {
    pub player: String,
    pub total: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionLog {
    pub version: u32,
    pub config: Config,
    pub scoring_mode: ScoringMode,
    pub calibration: CalibrationFile,
    pub records: Vec<ScoreRecord>,
    pub diagnostics: Vec<ShotDiagnostics>,
    pub totals: Vec<PlayerTotal>,
    pub ranking: Vec<PlayerTotal>,
}

impl SessionLog {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("session log serializes")
    }
}

/// Scores every frame transition. Player `k mod P` takes shot `k` and
/// shoots at target `k mod P` of each camera (wrapping when a camera has
/// fewer targets than players).
pub fn score(
    config: &Config,
    base: &Path,
    calibration: Option<CalibrationFile>,
    mode: ScoringMode,
) -> Result<SessionLog, CliError> {
    let frames: Vec<Vec<PathBuf>> = config.resolved_frames(base);
    let n = frames[0].len();
    if n < 2 || frames.iter().any(|f| f.len() != n) {
        return Err(CliError::Usage(
            "every camera needs the same number of frames, at least two".into(),
        ));
    }
    let calibration = match calibration {
        Some(c) => c,
        None => super::calibrate::calibrate(config, base)?,
    };
    let ids: Vec<&str> = calibration.cameras.iter().map(|c| c.id.as_str()).collect();
    let want: Vec<&str> = config.cameras.iter().map(|c| c.id.as_str()).collect();
    if ids != want {
        return Err(CliError::Config(format!(
            "calibration cameras {ids:?} do not match config cameras {want:?}"
        )));
    }
    let cameras: Vec<CameraTargets> = calibration
        .models()?
        .into_iter()
        .zip(&config.cameras)
        .map(|(models, cam)| {
            Ok(CameraTargets {
                id: cam.id.clone(),
                targets: models
                    .into_iter()
                    .map(|m| ScoringTarget::new(m, mode, &config.rings))
                    .collect::<Result<_, CliError>>()?,
            })
        })
        .collect::<Result<_, CliError>>()?;

    let arrow = config.params.arrow();
    let mut session =
        Session::new(config.players.clone()).map_err(|e| CliError::Config(e.to_string()))?;
    let mut diagnostics = Vec::new();
    let mut prev: Vec<RgbImage> = frames
        .iter()
        .map(|f| read_ppm(&f[0]))
        .collect::<Result<_, _>>()?;
    for k in 1..n {
        let curr: Vec<RgbImage> = frames
            .iter()
            .map(|f| read_ppm(&f[k]))
            .collect::<Result<_, _>>()?;
        let slot = (k - 1) % config.players.len();
        let player = &config.players[slot];
        let p: Vec<&RgbImage> = prev.iter().collect();
        let c: Vec<&RgbImage> = curr.iter().collect();
        let (fragment, diag) = score_shot(&cameras, slot, &p, &c, &arrow);
        session =
            record_shot(&session, player, fragment).map_err(|e| CliError::Config(e.to_string()))?;
        diagnostics.push(ShotDiagnostics {
            frame: k,
            player: player.clone(),
            target: slot,
            cameras: diag,
        });
        prev = curr;
    }
    let totals = session
        .players()
        .iter()
        .zip(session.totals())
        .map(|(p, &t)| PlayerTotal {
            player: p.clone(),
            total: t,
        })
        .collect();
    let ranking = ranking(&session)
        .into_iter()
        .map(|(player, total)| PlayerTotal { player, total })
        .collect();
    Ok(SessionLog {
        version: SESSION_VERSION,
        config: config.clone(),
        scoring_mode: mode,
        calibration,
        records: session.records().to_vec(),
        diagnostics,
        totals,
        ranking,
    })
}

pub fn ranking_table(log: &SessionLog) -> String {
    let w = log
        .ranking
        .iter()
        .map(|r| r.player.len())
        .max()
        .unwrap_or(0)
        .max(6);
    let mut out = format!("{:>4}  {:<w$}  {:>5}\n", "Rank", "Player", "Total");
    for (i, r) in log.ranking.iter().enumerate() {
        out.push_str(&format!("{:>4}  {:<w$}  {:>5}\n", i + 1, r.player, r.total));
    }
    out
}

pub fn run(
    config_path: &Path,
    calibration: Option<&Path>,
    mode: Option<ScoringMode>,
    out: &Path,
) -> Result<String, CliError> {
    let config = Config::load(config_path)?;
    let cal = calibration.map(CalibrationFile::load).transpose()?;
    let log = score(
        &config,
        config_dir(config_path),
        cal,
        mode.unwrap_or(config.scoring_mode),
    )?;
    super::write_text(out, &log.to_json())?;
    Ok(ranking_table(&log))
}
