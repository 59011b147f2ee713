use std::path::Path;

use crate::benchmark::{format_table, run_bench};
use crate::config::ScoringMode;
use crate::error::CliError;
use crate::scenario::Scenario;

pub fn run(
    scenario_path: &Path,
    trials: Option<usize>,
    mode: Option<ScoringMode>,
    seed: Option<u64>,
    out: &Path,
) -> Result<String, CliError> {
    let scenario = Scenario::load(scenario_path)?;
    let report = run_bench(
        &scenario,
        seed.unwrap_or(scenario.seed),
        trials,
        mode.unwrap_or(scenario.scoring_mode),
    )?;
    super::write_text(out, &report.to_json())?;
    let mut text = format_table(&report.rows);
    for f in &report.calibration_failures {
        text.push_str(&format!("calibration failure: {f}\n"));
    }
    Ok(text)
}
