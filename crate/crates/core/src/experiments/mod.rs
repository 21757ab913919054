//! Experiment drivers behind the `dpsbp` binary.
//!
//! Each run returns its output files in memory together with a list of
//! checks. [`write_outputs`] stores the files and a manifest carrying the
//! resolved config, SHA-256 hashes of every output and of the operators used,
//! and the crate version. Outputs contain no timestamps, so identical
//! configurations give byte-identical directories.

mod audit;
mod burgers;
pub mod config;
mod swe;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

pub use audit::run_operators_audit;
pub use burgers::{
    burgers_base_flow, convergence_exact, convergence_initial, observed_orders, ode_convergence, run_burgers_perturb, run_burgers_spectra,
    run_convergence,
};
pub use config::{resolve, EtaMode, ExperimentConfig, GammaMode, GammaName};
pub use swe::{run_swe1d_perturb, run_swe1d_spectra, run_swe2d_kh, run_swe2d_vortex};

use crate::dense::Dense;
use crate::error::{Error, Result};
use crate::linearization::{eigen_spectrum, SpectrumAnalysis, VerdictOptions};
use crate::multiblock::{assemble_periodic, GlobalOperator, Mesh1D};
use crate::operators::{build, write_operator};

/// An expectation evaluated by a run. `--assert` turns failures into exit code 2.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Check {
        Check { name: name.into(), pass, detail: detail.into() }
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOutput {
    /// File name to contents.
    pub files: BTreeMap<String, String>,
    pub checks: Vec<Check>,
    /// Operator label to SHA-256 of its text export.
    pub operator_hashes: BTreeMap<String, String>,
}

impl RunOutput {
    pub fn add_file(&mut self, name: impl Into<String>, contents: String) {
        self.files.insert(name.into(), contents);
    }

    pub fn add_json<T: Serialize>(&mut self, name: impl Into<String>, value: &T) -> Result<()> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.add_file(name, s);
        Ok(())
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    experiment: &'a str,
    version: &'a str,
    config: &'a ExperimentConfig,
    operator_hashes: &'a BTreeMap<String, String>,
    files: BTreeMap<&'a str, String>,
    checks: &'a [Check],
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut s = String::with_capacity(64);
    for b in digest {
        let _ = write!(s, "{b:02x}");
    }
    s
}

/// Manifest JSON for a finished run.
pub fn manifest_json(config: &ExperimentConfig, out: &RunOutput) -> Result<String> {
    let m = Manifest {
        experiment: &config.experiment,
        version: env!("CARGO_PKG_VERSION"),
        config,
        operator_hashes: &out.operator_hashes,
        files: out.files.iter().map(|(k, v)| (k.as_str(), sha256_hex(v.as_bytes()))).collect(),
        checks: &out.checks,
    };
    let mut s = serde_json::to_string_pretty(&m)?;
    s.push('\n');
    Ok(s)
}

/// Write every output file and `manifest.json` under `dir`.
pub fn write_outputs(dir: &Path, config: &ExperimentConfig, out: &RunOutput) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, contents) in &out.files {
        std::fs::write(dir.join(name), contents)?;
    }
    std::fs::write(dir.join("manifest.json"), manifest_json(config, out)?)?;
    Ok(())
}

/// Dispatch on `config.experiment`.
pub fn run(config: &ExperimentConfig) -> Result<RunOutput> {
    match config.experiment.as_str() {
        "operators-audit" => run_operators_audit(config),
        "burgers-spectra" => run_burgers_spectra(config),
        "burgers-perturb" => run_burgers_perturb(config),
        "swe1d-spectra" => run_swe1d_spectra(config),
        "swe1d-perturb" => run_swe1d_perturb(config),
        "swe2d-vortex" => run_swe2d_vortex(config),
        "swe2d-kh" => run_swe2d_kh(config),
        "convergence" => run_convergence(config),
        other => Err(Error::Config(format!("unknown experiment '{other}'"))),
    }
}

/// Periodic mesh of `config.elements` equal elements tiling `[x0, x0 + length]`.
pub fn build_ops(config: &ExperimentConfig, length: f64, x0: f64) -> Result<GlobalOperator> {
    let k = config.elements;
    let pair = build(config.family, config.order, config.element_nodes(), length / k as f64, config.dg_strength)?;
    assemble_periodic(Mesh1D::uniform(pair, k, x0))
}

pub(crate) fn record_operator(out: &mut RunOutput, label: &str, ops: &GlobalOperator) {
    let text = write_operator(&ops.mesh.elements[0]);
    out.operator_hashes.insert(label.to_string(), sha256_hex(text.as_bytes()));
}

pub(crate) fn check_dense_limit(config: &ExperimentConfig, dof: usize) -> Result<()> {
    if dof > config.dense_limit {
        return Err(Error::Config(format!(
            "{dof} degrees of freedom exceed dense_limit {}; raise it or use a smaller mesh",
            config.dense_limit
        )));
    }
    Ok(())
}

/// Spectrum of `q` with the configured verdict thresholds.
pub(crate) fn analyse(config: &ExperimentConfig, q: &Dense, dx: f64, eta_base: f64) -> Result<SpectrumAnalysis> {
    let eta_c = match config.eta_mode {
        EtaMode::Zero => 0.0,
        EtaMode::BaseFlow => eta_base,
    };
    let mut opts = VerdictOptions::standard(q, dx, eta_c);
    if let Some(b) = config.band {
        opts.band = b;
    }
    eigen_spectrum(q, opts)
}

pub(crate) fn fmt_e(v: f64) -> String {
    format!("{v:.12e}")
}

/// Time series CSV with a header and one row per sample.
pub(crate) fn series_csv(header: &str, rows: &[Vec<f64>]) -> String {
    let mut s = format!("{header}\n");
    for r in rows {
        let cells: Vec<String> = r.iter().map(|v| fmt_e(*v)).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

/// Grid snapshot (rows are y, columns x) and its JSON sidecar.
pub(crate) fn snapshot(
    out: &mut RunOutput,
    stem: &str,
    field: &str,
    x: &[f64],
    y: &[f64],
    values: &[f64],
    t: f64,
    physics: serde_json::Value,
) -> Result<()> {
    let nx = x.len();
    let mut csv = String::new();
    for row in values.chunks(nx) {
        let cells: Vec<String> = row.iter().map(|v| fmt_e(*v)).collect();
        csv.push_str(&cells.join(","));
        csv.push('\n');
    }
    out.add_file(format!("{stem}.csv"), csv);
    let side = serde_json::json!({
        "field": field,
        "nx": nx,
        "ny": y.len(),
        "layout": "row-major, one CSV row per y coordinate",
        "t": t,
        "x": x,
        "y": y,
        "physics": physics,
    });
    out.add_json(format!("{stem}.json"), &side)
}
