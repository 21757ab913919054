//! Experiment configuration: built-in defaults, a JSON file, then `key=value`
//! overrides, merged in that order.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::operators::Family;

pub const EXPERIMENTS: [&str; 8] = [
    "operators-audit",
    "burgers-spectra",
    "burgers-perturb",
    "swe1d-spectra",
    "swe1d-perturb",
    "swe2d-vortex",
    "swe2d-kh",
    "convergence",
];

const ONE_D: [&str; 4] = ["burgers-spectra", "burgers-perturb", "swe1d-spectra", "swe1d-perturb"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GammaName {
    Zero,
    Opt,
    Lf,
}

/// Volume upwind selection: a named rule or an explicit value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GammaMode {
    Named(GammaName),
    Value(f64),
}

/// Reference growth rate used by the verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EtaMode {
    /// `η_c = 0`: any growth beyond the tolerance band is unstable.
    Zero,
    /// `η_c = max(0, -min ∂ₓa)` from the base flow.
    BaseFlow,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub family: Family,
    /// FD interior order or DG degree.
    pub order: usize,
    /// Elements per direction.
    pub elements: usize,
    /// Nodes per element (ignored by DG, which uses `order + 1`).
    pub nodes: usize,
    pub dg_strength: f64,
    pub alpha: f64,
    pub gamma: GammaMode,
    pub dt: f64,
    pub t_final: f64,
    pub checkpoint_stride: usize,
    /// Max-abs amplitude of perturbation seeds.
    pub amplitude: f64,
    pub seed: u64,
    pub trials: usize,
    pub g: f64,
    pub eta_mode: EtaMode,
    /// Overrides the verdict band `1e-6 ‖Q‖ Δx` when set.
    pub band: Option<f64>,
    pub dense_limit: usize,
    /// Uniform FFT grid for turbulence spectra.
    pub resample: usize,
    pub slope_window: [usize; 2],
    /// Where outputs go. Left out of manifests so they do not depend on it.
    #[serde(skip_serializing)]
    pub output_dir: String,
    pub paper_scale: bool,
}

fn base_defaults() -> Value {
    serde_json::json!({
        "family": "FD_UPWIND",
        "order": 4,
        "elements": 6,
        "nodes": 16,
        "dg_strength": 0.1,
        "alpha": 2.0 / 3.0,
        "gamma": "OPT",
        "dt": 1e-4,
        "t_final": 2.0,
        "checkpoint_stride": 100,
        "amplitude": 1e-3,
        "seed": 1,
        "trials": 1000,
        "g": 1.0,
        "eta_mode": "zero",
        "band": null,
        "dense_limit": 4096,
        "resample": 64,
        "slope_window": [3, 12],
        "output_dir": "out",
        "paper_scale": false
    })
}

/// Desk-scale defaults per experiment; `paper_scale` switches to the
/// full-size resolutions and run lengths.
pub fn defaults(experiment: &str, paper_scale: bool) -> Result<Value> {
    if !EXPERIMENTS.contains(&experiment) {
        return Err(Error::Config(format!("unknown experiment '{experiment}'")));
    }
    let mut v = base_defaults();
    let m = v.as_object_mut().expect("object");
    m.insert("experiment".into(), Value::from(experiment));
    m.insert("paper_scale".into(), Value::from(paper_scale));
    let set = |m: &mut Map<String, Value>, pairs: &[(&str, Value)]| {
        for (k, val) in pairs {
            m.insert((*k).into(), val.clone());
        }
    };
    match experiment {
        "operators-audit" => set(m, &[("nodes", 64.into())]),
        "burgers-spectra" => {}
        "burgers-perturb" => {
            if paper_scale {
                set(m, &[("t_final", 10.0.into())]);
            }
        }
        "swe1d-spectra" | "swe1d-perturb" => set(
            m,
            &[("dt", 1e-5.into()), ("t_final", 0.2.into()), ("checkpoint_stride", 1000.into())],
        ),
        "swe2d-vortex" => {
            set(
                m,
                &[
                    ("family", "DG_LGL".into()),
                    ("order", 4.into()),
                    ("elements", 6.into()),
                    ("dt", 5e-3.into()),
                    ("t_final", 1.0.into()),
                    ("checkpoint_stride", 50.into()),
                    ("eta_mode", "zero".into()),
                ],
            );
            if paper_scale {
                set(
                    m,
                    &[("order", 5.into()), ("elements", 10.into()), ("t_final", 100.0.into()), ("dense_limit", 12000.into())],
                );
            }
        }
        "swe2d-kh" => {
            set(
                m,
                &[
                    ("family", "DG_LGL".into()),
                    ("order", 4.into()),
                    ("elements", 16.into()),
                    ("g", 9.80616.into()),
                    ("dt", 2e-3.into()),
                    ("t_final", (20.0 * 86400.0).into()),
                    ("checkpoint_stride", 100.into()),
                    ("resample", 128.into()),
                    ("slope_window", serde_json::json!([4, 24])),
                ],
            );
            if paper_scale {
                set(m, &[("elements", 64.into()), ("t_final", (80.0 * 86400.0).into()), ("resample", 512.into())]);
            }
        }
        "convergence" => set(
            m,
            &[("order", 3.into()), ("elements", 1.into()), ("nodes", 32.into()), ("t_final", 0.1.into()), ("dt", 1e-4.into())],
        ),
        _ => unreachable!(),
    }
    Ok(v)
}

/// Parse one `key=value` override. The value is read as JSON when possible and
/// as a bare string otherwise.
pub fn parse_override(s: &str) -> Result<(String, Value)> {
    let (k, v) = s.split_once('=').ok_or_else(|| Error::Config(format!("override '{s}' is not key=value")))?;
    let k = k.trim();
    if k.is_empty() {
        return Err(Error::Config(format!("override '{s}' has an empty key")));
    }
    let v = v.trim();
    let val = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
    Ok((k.to_string(), val))
}

/// Merge defaults, an optional config document and overrides.
pub fn resolve(experiment: &str, paper_scale: bool, file: Option<&str>, overrides: &[String]) -> Result<ExperimentConfig> {
    let mut v = defaults(experiment, paper_scale)?;
    let m = v.as_object_mut().expect("object");
    let mut explicit_elements = false;
    if let Some(text) = file {
        let doc: Value = serde_json::from_str(text)?;
        let obj = doc.as_object().ok_or_else(|| Error::Config("config must be a JSON object".into()))?;
        for (k, val) in obj {
            if k == "experiment" && val.as_str() != Some(experiment) {
                return Err(Error::Config(format!("config is for experiment {val}, not '{experiment}'")));
            }
            explicit_elements |= k == "elements";
            m.insert(k.clone(), val.clone());
        }
    }
    for o in overrides {
        let (k, val) = parse_override(o)?;
        if !m.contains_key(&k) {
            return Err(Error::Config(format!("unknown config key '{k}'")));
        }
        explicit_elements |= k == "elements";
        m.insert(k, val);
    }
    // 1D DG runs default to 16 elements, FD runs to 6 elements of 16 nodes
    if !explicit_elements && ONE_D.contains(&experiment) && m.get("family") == Some(&Value::from("DG_LGL")) {
        m.insert("elements".into(), 16.into());
    }
    let cfg: ExperimentConfig = serde_json::from_value(v).map_err(|e| Error::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.elements == 0 {
            return bad("elements must be positive".into());
        }
        if !(self.dt > 0.0) || !(self.t_final >= 0.0) || self.checkpoint_stride == 0 {
            return bad(format!("invalid time loop dt={} t_final={} stride={}", self.dt, self.t_final, self.checkpoint_stride));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return bad(format!("alpha {} outside [0, 1]", self.alpha));
        }
        if let GammaMode::Value(v) = self.gamma {
            if !(v >= 0.0) {
                return bad(format!("gamma {v} must be non-negative"));
            }
        }
        if self.slope_window[1] <= self.slope_window[0] || self.slope_window[0] == 0 {
            return bad(format!("slope window {:?}", self.slope_window));
        }
        Ok(())
    }

    /// Nodes per element after applying the family rule.
    pub fn element_nodes(&self) -> usize {
        match self.family {
            Family::DgLgl => self.order + 1,
            _ => self.nodes,
        }
    }
}
