//! Ring lookup, camera fusion, sessions and rankings.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arrow::{ArrowDetection, ArrowError};
use crate::ellipse::point_in_ellipse;
use crate::target::TargetModel;
use crate::Point;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScoreError {
    #[error("unknown player {0:?}")]
    UnknownPlayer(String),
    #[error("duplicate player {0:?}")]
    DuplicatePlayer(String),
}

/// Score of the smallest ring containing `p` (boundaries count as inside),
/// 0 for a miss.
pub fn score_point(target: &TargetModel, p: Point) -> u32 {
    target
        .rings
        .iter()
        .rev()
        .find(|r| point_in_ellipse(&r.boundary, p))
        .map_or(0, |r| r.score)
}

/// Walks the rings from largest to smallest and stops at the first one that
/// no longer contains `p`; the point belongs to the ring before it.
pub fn traversal_score(target: &TargetModel, p: Point) -> u32 {
    let mut score = 0;
    for ring in &target.rings {
        if !point_in_ellipse(&ring.boundary, p) {
            break;
        }
        score = ring.score;
    }
    score
}

/// Like [`score_point`], also reporting whether the size-ordered traversal
/// agrees. They differ only when fitted rings are not nested.
pub fn score_point_checked(target: &TargetModel, p: Point) -> (u32, bool) {
    let s = score_point(target, p);
    (s, s == traversal_score(target, p))
}

/// One camera's contribution to a shot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CameraScore {
    pub camera_id: String,
    /// `None` when the camera's detection failed.
    pub score: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Fused per-shot result before it is attributed to a player.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotFragment {
    pub camera_scores: Vec<CameraScore>,
    pub final_score: u32,
    /// Set when every camera failed.
    pub flagged: bool,
}

/// Max over the cameras that produced a score; 0 and flagged when none did.
pub fn fuse(camera_scores: Vec<CameraScore>) -> ShotFragment {
    let best = camera_scores.iter().filter_map(|c| c.score).max();
    ShotFragment {
        final_score: best.unwrap_or(0),
        flagged: best.is_none(),
        camera_scores,
    }
}

/// Scores each successful detection against its own camera's target and
/// fuses by max. `targets` is parallel to `detections`.
pub fn score_arrow(
    detections: &[(String, Result<ArrowDetection, ArrowError>)],
    targets: &[&TargetModel],
) -> ShotFragment {
    assert_eq!(detections.len(), targets.len(), "one target per camera");
    fuse(
        detections
            .iter()
            .zip(targets)
            .map(|((id, det), target)| match det {
                Ok(d) => CameraScore {
                    camera_id: id.clone(),
                    score: Some(score_point(target, d.tip_point())),
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
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub player: String,
    /// Zero-based count of this player's earlier arrows.
    pub arrow_index: usize,
    pub camera_scores: Vec<CameraScore>,
    pub final_score: u32,
    pub flagged: bool,
}

/// Append-only shot log with running totals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Session {
    players: Vec<String>,
    records: Vec<ScoreRecord>,
    totals: Vec<u64>,
}

impl Session {
    pub fn new(players: Vec<String>) -> Result<Self, ScoreError> {
        for (i, p) in players.iter().enumerate() {
            if players[..i].contains(p) {
                return Err(ScoreError::DuplicatePlayer(p.clone()));
            }
        }
        let totals = vec![0; players.len()];
        Ok(Self {
            players,
            records: Vec::new(),
            totals,
        })
    }

    pub fn players(&self) -> &[String] {
        &self.players
    }

    pub fn records(&self) -> &[ScoreRecord] {
        &self.records
    }

    pub fn total(&self, player: &str) -> Option<u64> {
        self.index_of(player).map(|i| self.totals[i])
    }

    fn index_of(&self, player: &str) -> Option<usize> {
        self.players.iter().position(|p| p == player)
    }

    /// Totals recomputed from the record log alone.
    pub fn replay_totals(&self) -> Vec<u64> {
        let mut totals = vec![0; self.players.len()];
        for r in &self.records {
            if let Some(i) = self.index_of(&r.player) {
                totals[i] += r.final_score as u64;
            }
        }
        totals
    }

    pub fn totals(&self) -> &[u64] {
        &self.totals
    }
}

/// Returns the session with the shot appended and the player's total updated.
pub fn record_shot(
    session: &Session,
    player: &str,
    fragment: ShotFragment,
) -> Result<Session, ScoreError> {
    let i = session
        .index_of(player)
        .ok_or_else(|| ScoreError::UnknownPlayer(player.to_string()))?;
    let mut next = session.clone();
    let arrow_index = next.records.iter().filter(|r| r.player == player).count();
    next.totals[i] += fragment.final_score as u64;
    next.records.push(ScoreRecord {
        player: player.to_string(),
        arrow_index,
        camera_scores: fragment.camera_scores,
        final_score: fragment.final_score,
        flagged: fragment.flagged,
    });
    Ok(next)
}

/// Players by total, highest first; ties keep registration order.
pub fn ranking(session: &Session) -> Vec<(String, u64)> {
    let mut order: Vec<usize> = (0..session.players.len()).collect();
    order.sort_by(|&a, &b| session.totals[b].cmp(&session.totals[a]));
    order
        .into_iter()
        .map(|i| (session.players[i].clone(), session.totals[i]))
        .collect()
}
