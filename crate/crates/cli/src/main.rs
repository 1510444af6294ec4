use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use log::LevelFilter;

use ftct_cli::{exit_code, run, summary_text, RunOptions, EXIT_ERROR};

/// Runs a verification suite described by an experiment file.
#[derive(Parser, Debug)]
#[command(name = "ftct", version)]
struct Args {
    /// Experiment file (`key = value` lines)
    #[arg(long)]
    config: PathBuf,
    /// Directory for the CSV, plot data and summary
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Overrides the seed in the experiment file
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (defaults to the number of cores)
    #[arg(long)]
    jobs: Option<usize>,
}

fn init_logging() -> Result<(), String> {
    let level = match std::env::var("FTCT_LOG").as_deref() {
        Err(_) | Ok("info") => LevelFilter::Info,
        Ok("quiet") => LevelFilter::Off,
        Ok("debug") => LevelFilter::Debug,
        Ok(other) => {
            return Err(format!(
                "FTCT_LOG must be quiet, info or debug, got `{other}`"
            ))
        }
    };
    env_logger::Builder::new().filter_level(level).init();
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Err(e) = init_logging() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_ERROR as u8);
    }
    if let Some(n) = args.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_ERROR as u8);
        }
    }
    let result = run(&RunOptions {
        config: args.config,
        out_dir: args.out,
        seed: args.seed,
    });
    match &result {
        Ok((outcome, cfg, _)) => print!("{}", summary_text(outcome, cfg)),
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(exit_code(&result) as u8)
}
