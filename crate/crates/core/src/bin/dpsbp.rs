//! Command-line driver: `dpsbp <experiment> [--config FILE] [--override k=v]... [--paper-scale] [--assert]`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use dpsbp::experiments::{self, config::EXPERIMENTS};

#[derive(Parser, Debug)]
#[command(name = "dpsbp", version, about = "DP-SBP stability experiments")]
struct Cli {
    /// One of: operators-audit, burgers-spectra, burgers-perturb, swe1d-spectra,
    /// swe1d-perturb, swe2d-vortex, swe2d-kh, convergence.
    experiment: String,
    /// JSON config document; its keys override the built-in defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// `key=value` applied after the config file. Repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Use the full-size resolutions and run lengths.
    #[arg(long)]
    paper_scale: bool,
    /// Exit with code 2 if any expectation of the run fails.
    #[arg(long)]
    assert: bool,
    /// Output directory (overrides `output_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    // exit code 2 is reserved for failed expectations, so usage errors map to 1
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if !EXPERIMENTS.contains(&cli.experiment.as_str()) {
        eprintln!("error: unknown experiment '{}'; expected one of {}", cli.experiment, EXPERIMENTS.join(", "));
        return ExitCode::from(1);
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> dpsbp::Result<bool> {
    let text = cli.config.as_ref().map(std::fs::read_to_string).transpose()?;
    let mut cfg = experiments::resolve(&cli.experiment, cli.paper_scale, text.as_deref(), &cli.overrides)?;
    if let Some(dir) = &cli.out {
        cfg.output_dir = dir.to_string_lossy().into_owned();
    }
    let out = experiments::run(&cfg)?;
    let dir = PathBuf::from(&cfg.output_dir);
    experiments::write_outputs(&dir, &cfg, &out)?;
    for c in &out.checks {
        println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    println!("wrote {} files to {}", out.files.len() + 1, dir.display());
    Ok(!cli.assert || out.all_pass())
}
