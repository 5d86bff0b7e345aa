//! `weakphase <scenario> --config <file> [--out <dir>] [--seed <int>]`
//!
//! Exit status: 0 success, 1 configuration error, 2 numerical failure or a
//! failed in-run check, 3 I/O error. Errors are reported on stderr as one
//! line of the form `error kind=<kind>: <message>`.

mod config;
mod error;
mod scenarios;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use config::ScenarioConfig;
use error::{CliError, CliResult};

#[derive(Parser, Debug)]
#[command(name = "weakphase", version, about = "Phase retrieval and weak-measurement scenario runner")]
struct Args {
    /// Scenario to run; must match the `scenario` key of the config.
    #[arg(value_parser = ["retrieve", "crystal", "sliver", "bridge", "zeros"])]
    scenario: String,
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output_dir` from the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for randomized objects; overrides `seed` from the config.
    #[arg(long)]
    seed: Option<u64>,
}

fn execute(args: &Args) -> CliResult<PathBuf> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", args.config.display())))?;
    let mut cfg = ScenarioConfig::parse(&text)?;
    if cfg.scenario.as_str() != args.scenario {
        return Err(CliError::Config(format!(
            "command-line scenario `{}` does not match config scenario `{}`",
            args.scenario,
            cfg.scenario.as_str()
        )));
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.output_dir = Some(out.clone());
    }
    let out = cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from("out"));
    cfg.output_dir = Some(out.clone());
    std::fs::create_dir_all(&out).map_err(|e| CliError::Io(format!("cannot create {}: {e}", out.display())))?;

    let base = args.config.parent().unwrap_or(Path::new("."));
    let outcome = scenarios::run(&cfg, &out, base)?;
    let passed = outcome.assertions.iter().all(|a| a.passed);
    let metadata = json!({
        "scenario": cfg.scenario.as_str(),
        "version": env!("CARGO_PKG_VERSION"),
        "config": cfg,
        "outputs": outcome.outputs,
        "summary": outcome.summary,
        "assertions": outcome.assertions,
        "passed": passed,
    });
    weakphase_core::io::write_json(&out.join("metadata.json"), &metadata)?;
    if let Some(failed) = outcome.assertions.iter().find(|a| !a.passed) {
        return Err(CliError::Numerical(format!(
            "check `{}` failed: {} exceeds {}",
            failed.name, failed.value, failed.limit
        )));
    }
    Ok(out)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) if !e.use_stderr() => {
            // help and version requests
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.to_string();
            let first = message.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            eprintln!("{}", CliError::Config(first.to_string()).render());
            return ExitCode::from(1);
        }
    };
    match execute(&args) {
        Ok(out) => {
            println!("wrote {}", out.join("metadata.json").display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.render());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
