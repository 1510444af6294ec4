//! Batch driver: reads an experiment file, runs one verification suite and
//! writes its CSV, gnuplot data and a plain-text summary.

pub mod config;
pub mod error;
pub mod suites;

use std::fs;
use std::path::{Path, PathBuf};

pub use config::{ExperimentConfig, Suite};
pub use error::{CliError, ConfigError};
pub use suites::{Outcome, Status};

/// Every check passed or did not apply.
pub const EXIT_PASS: i32 = 0;
/// Some check failed or could not be decided.
pub const EXIT_FAIL: i32 = 1;
/// The configuration or the file system got in the way.
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub config: PathBuf,
    pub out_dir: PathBuf,
    pub seed: Option<u64>,
}

/// Files written by [`emit_report`].
#[derive(Debug, Clone)]
pub struct ReportFiles {
    pub csv: PathBuf,
    pub plot: PathBuf,
    pub summary: PathBuf,
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })?;
    ExperimentConfig::parse(&text).map_err(|source| CliError::Config {
        path: path.into(),
        source,
    })
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })
}

/// Writes the suite CSV to `out_dir/output_path` and the plot data and
/// summary next to it (`.dat` and `.summary.txt`).
pub fn emit_report(
    outcome: &Outcome,
    cfg: &ExperimentConfig,
    out_dir: &Path,
) -> Result<ReportFiles, CliError> {
    let csv = out_dir.join(&cfg.output_path);
    if let Some(parent) = csv.parent() {
        fs::create_dir_all(parent).map_err(|source| CliError::Io {
            path: parent.into(),
            source,
        })?;
    }
    let files = ReportFiles {
        plot: csv.with_extension("dat"),
        summary: csv.with_extension("summary.txt"),
        csv,
    };
    write(&files.csv, &outcome.csv)?;
    write(&files.plot, &outcome.plot)?;
    write(&files.summary, &summary_text(outcome, cfg))?;
    Ok(files)
}

pub fn summary_text(outcome: &Outcome, cfg: &ExperimentConfig) -> String {
    let mut s = format!("suite {} seed {}\n", cfg.suite.name(), cfg.seed);
    for line in &outcome.summary {
        s.push_str(line);
        s.push('\n');
    }
    let counts: Vec<String> = [
        Status::Pass,
        Status::Fail,
        Status::NotApplicable,
        Status::Inconclusive,
    ]
    .into_iter()
    .map(|st| format!("{st} {}", outcome.count(st)))
    .collect();
    s.push_str(&counts.join(", "));
    s.push('\n');
    s.push_str(if outcome.passed() {
        "verdict: PASS\n"
    } else {
        "verdict: FAIL\n"
    });
    s
}

/// Loads the configuration, runs its suite and writes the report.
pub fn run(opts: &RunOptions) -> Result<(Outcome, ExperimentConfig, ReportFiles), CliError> {
    let mut cfg = load_config(&opts.config)?;
    if let Some(seed) = opts.seed {
        cfg.seed = seed;
    }
    log::info!("running suite {} with seed {}", cfg.suite.name(), cfg.seed);
    let outcome = suites::run_suite(&cfg)?;
    let files = emit_report(&outcome, &cfg, &opts.out_dir)?;
    log::info!("wrote {}", files.csv.display());
    Ok((outcome, cfg, files))
}

pub fn exit_code(result: &Result<(Outcome, ExperimentConfig, ReportFiles), CliError>) -> i32 {
    match result {
        Ok((o, _, _)) if o.passed() => EXIT_PASS,
        Ok(_) => EXIT_FAIL,
        Err(_) => EXIT_ERROR,
    }
}
