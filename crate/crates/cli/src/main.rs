use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ringscore_cli::commands;
use ringscore_cli::{CliError, ScoringMode};

#[derive(Parser)]
#[command(
    name = "score-cli",
    version,
    about = "Score arrows on ring targets from camera frames"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detect the rings of every hinted target in each camera's first frame.
    Calibrate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "calibration.json")]
        out: PathBuf,
    },
    /// Score every frame transition and write the session log.
    Score {
        #[arg(long)]
        config: PathBuf,
        /// Reuse a calibration file instead of calibrating from the first frames.
        #[arg(long)]
        calibration: Option<PathBuf>,
        #[arg(long, value_enum)]
        mode: Option<ScoringMode>,
        #[arg(long, default_value = "session.json")]
        out: PathBuf,
    },
    /// Run a synthetic scenario through the pipeline and report accuracy.
    Bench {
        /// Scenario file.
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, value_enum)]
        mode: Option<ScoringMode>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "bench.json")]
        out: PathBuf,
    },
    /// Render a scenario to PPM frames plus ground truth.
    Synth {
        /// Scenario file.
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
    },
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Calibrate { config, out } => commands::calibrate::run(&config, &out),
        Command::Score {
            config,
            calibration,
            mode,
            out,
        } => commands::score::run(&config, calibration.as_deref(), mode, &out),
        Command::Bench {
            config,
            trials,
            mode,
            seed,
            out,
        } => commands::bench::run(&config, trials, mode, seed, &out),
        Command::Synth {
            config,
            out,
            seed,
            trials,
        } => commands::synth::run(&config, seed, trials, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(1);
        }
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
