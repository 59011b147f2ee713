//! Accuracy benchmark over synthetic scenarios.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use ringscore_core::{fuse, CameraScore, RgbImage};
use serde::{Deserialize, Serialize};

use crate::calibration::calibrate_camera;
use crate::config::ScoringMode;
use crate::error::CliError;
use crate::pipeline::{score_shot, CameraDiagnostic, CameraTargets, ScoringTarget};
use crate::scenario::{EndRenderer, PlannedShot, Scenario, TruthShot};

pub const BENCH_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotResult {
    #[serde(flatten)]
    pub truth: TruthShot,
    pub final_score: u32,
    pub flagged: bool,
    pub camera_scores: Vec<CameraScore>,
    pub diagnostics: Vec<CameraDiagnostic>,
}

impl ShotResult {
    pub fn correct(&self) -> bool {
        self.final_score == self.truth.true_score
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyRow {
    pub label: String,
    pub correct: usize,
    pub incorrect: usize,
    pub total: usize,
    /// Percent with two decimals, e.g. `"87.50%"`.
    pub accuracy: String,
}

impl AccuracyRow {
    pub fn new(label: String, correct: usize, total: usize) -> Self {
        let pct = if total == 0 {
            0.0
        } else {
            100.0 * correct as f64 / total as f64
        };
        Self {
            label,
            correct,
            incorrect: total - correct,
            total,
            accuracy: format!("{pct:.2}%"),
        }
    }

    pub fn fraction(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.correct as f64 / self.total as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub version: u32,
    pub scenario: String,
    pub mode: ScoringMode,
    pub seed: u64,
    pub trials: usize,
    /// One row per camera, then `Overall`.
    pub rows: Vec<AccuracyRow>,
    pub calibration_failures: Vec<String>,
    pub shots: Vec<ShotResult>,
}

impl BenchReport {
    pub fn overall(&self) -> &AccuracyRow {
        self.rows.last().expect("overall row")
    }

    pub fn row(&self, label: &str) -> Option<&AccuracyRow> {
        self.rows.iter().find(|r| r.label == label)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// `"side"` → `"Side camera"`.
pub fn camera_label(id: &str) -> String {
    let mut chars = id.chars();
    match chars.next() {
        Some(c) => format!("{}{} camera", c.to_uppercase(), chars.as_str()),
        None => "camera".to_string(),
    }
}

/// Fixed-width text table with columns Correct, Incorrect, Total, Accuracy.
pub fn format_table(rows: &[AccuracyRow]) -> String {
    let w = rows.iter().map(|r| r.label.len()).max().unwrap_or(0).max(7);
    let mut out = format!(
        "{:<w$}  {:>7}  {:>9}  {:>5}  {:>8}\n",
        "", "Correct", "Incorrect", "Total", "Accuracy"
    );
    for r in rows {
        out.push_str(&format!(
            "{:<w$}  {:>7}  {:>9}  {:>5}  {:>8}\n",
            r.label, r.correct, r.incorrect, r.total, r.accuracy
        ));
    }
    out
}

struct EndOutput {
    shots: Vec<ShotResult>,
    failures: Vec<String>,
}

fn run_end(
    scenario: &Scenario,
    end: usize,
    shots: &[PlannedShot],
    truth: &[TruthShot],
    seed: u64,
    mode: ScoringMode,
) -> Result<EndOutput, CliError> {
    let detection = scenario.params.detection(&scenario.rings);
    let arrow = scenario.params.arrow();
    let mut renderers = Vec::new();
    let mut prev: Vec<RgbImage> = Vec::new();
    // Cameras whose calibration failed score nothing for the whole end.
    let mut cameras: Vec<Option<CameraTargets>> = Vec::new();
    let mut failures = Vec::new();
    for (k, cam) in scenario.cameras.iter().enumerate() {
        let r = EndRenderer::new(scenario, k, end, seed)?;
        let first = r.first();
        let hint = [cam.target.center];
        let calibrated =
            calibrate_camera(&cam.id, &first, &hint, &detection).and_then(|(_, models)| {
                models
                    .into_iter()
                    .map(|m| ScoringTarget::new(m, mode, &scenario.rings))
                    .collect::<Result<Vec<_>, _>>()
            });
        match calibrated {
            Ok(targets) => cameras.push(Some(CameraTargets {
                id: cam.id.clone(),
                targets,
            })),
            Err(CliError::Calibration(msg)) => {
                failures.push(format!("end {end}: {msg}"));
                cameras.push(None);
            }
            Err(e) => return Err(e),
        }
        prev.push(first);
        renderers.push(r);
    }
    let live: Vec<CameraTargets> = cameras.iter().flatten().cloned().collect();
    let mut out = Vec::with_capacity(shots.len());
    for (shot, t) in shots.iter().zip(truth) {
        let curr: Vec<RgbImage> = renderers
            .iter_mut()
            .map(|r| r.add(shot))
            .collect::<Result<_, _>>()?;
        let live_prev: Vec<&RgbImage> = cameras
            .iter()
            .zip(&prev)
            .filter(|(c, _)| c.is_some())
            .map(|(_, p)| p)
            .collect();
        let live_curr: Vec<&RgbImage> = cameras
            .iter()
            .zip(&curr)
            .filter(|(c, _)| c.is_some())
            .map(|(_, p)| p)
            .collect();
        let (fragment, diag) = if live.is_empty() {
            (fuse(Vec::new()), Vec::new())
        } else {
            score_shot(&live, 0, &live_prev, &live_curr, &arrow)
        };
        let mut scores = fragment.camera_scores.into_iter();
        let camera_scores: Vec<CameraScore> = scenario
            .cameras
            .iter()
            .zip(&cameras)
            .map(|(cam, c)| match c {
                Some(_) => scores.next().expect("one score per live camera"),
                None => CameraScore {
                    camera_id: cam.id.clone(),
                    score: None,
                    error: Some("calibration failed".into()),
                },
            })
            .collect();
        let fused = fuse(camera_scores);
        out.push(ShotResult {
            truth: t.clone(),
            final_score: fused.final_score,
            flagged: fused.flagged,
            camera_scores: fused.camera_scores,
            diagnostics: diag,
        });
        prev = curr;
    }
    Ok(EndOutput {
        shots: out,
        failures,
    })
}

/// Runs the full pipeline over every planned shot and compares each fused
/// score with the analytic ground truth. Ends run on parallel threads; the
/// result does not depend on the thread count.
pub fn run_bench(
    scenario: &Scenario,
    seed: u64,
    trials: Option<usize>,
    mode: ScoringMode,
) -> Result<BenchReport, CliError> {
    scenario.validate()?;
    let plan = scenario.plan(seed, trials)?;
    let truth = scenario.truth(&plan);
    let n_ends = plan.len().div_ceil(scenario.shots_per_end);
    let workers = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(n_ends.max(1));
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<EndOutput, CliError>>>> =
        Mutex::new((0..n_ends).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let end = next.fetch_add(1, Ordering::Relaxed);
                if end >= n_ends {
                    break;
                }
                let lo = end * scenario.shots_per_end;
                let hi = (lo + scenario.shots_per_end).min(plan.len());
                let r = run_end(scenario, end, &plan[lo..hi], &truth[lo..hi], seed, mode);
                results.lock().expect("results lock")[end] = Some(r);
            });
        }
    });
    let mut shots = Vec::with_capacity(plan.len());
    let mut calibration_failures = Vec::new();
    for r in results.into_inner().expect("results lock") {
        let end = r.expect("every end ran")?;
        shots.extend(end.shots);
        calibration_failures.extend(end.failures);
    }
    let mut rows: Vec<AccuracyRow> = scenario
        .cameras
        .iter()
        .enumerate()
        .map(|(k, cam)| {
            let correct = shots
                .iter()
                .filter(|s| s.camera_scores[k].score == Some(s.truth.true_score))
                .count();
            AccuracyRow::new(camera_label(&cam.id), correct, shots.len())
        })
        .collect();
    rows.push(AccuracyRow::new(
        "Overall".into(),
        shots.iter().filter(|s| s.correct()).count(),
        shots.len(),
    ));
    Ok(BenchReport {
        version: BENCH_VERSION,
        scenario: scenario.name.clone(),
        mode,
        seed,
        trials: shots.len(),
        rows,
        calibration_failures,
        shots,
    })
}
