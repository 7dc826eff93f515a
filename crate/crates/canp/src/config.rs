//! Run configuration: JSON file layered over per-experiment defaults, then
//! dotted command-line overrides.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use canp_core::{Complex64, ModelParams, ModelVariant};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Fig2a,
    Fig2b,
    Fig2bInset,
    Fig3a,
    Fig3b,
    LmgThreshold,
    Displacement,
    Validate,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Self::Fig2a => "fig2a",
            Self::Fig2b => "fig2b",
            Self::Fig2bInset => "fig2b-inset",
            Self::Fig3a => "fig3a",
            Self::Fig3b => "fig3b",
            Self::LmgThreshold => "lmg-threshold",
            Self::Displacement => "displacement",
            Self::Validate => "validate",
        }
    }

    /// Sweep axes the experiment reads, in output column order.
    pub fn axes(self) -> &'static [&'static str] {
        match self {
            Self::Fig2a => &[AXIS_TC, AXIS_T_THETA],
            Self::Fig2b | Self::Fig3a | Self::Displacement => &[AXIS_TC],
            Self::Fig2bInset | Self::Fig3b => &["g"],
            Self::LmgThreshold => &["lambda"],
            Self::Validate => &[],
        }
    }

    fn variant(self) -> Option<ModelVariant> {
        match self {
            Self::LmgThreshold => Some(ModelVariant::LmgFrequency),
            Self::Displacement => Some(ModelVariant::QrmDisplacement),
            Self::Validate => None,
            _ => Some(ModelVariant::QrmFrequency),
        }
    }
}

pub const AXIS_TC: &str = "sqrtDelta_tc";
pub const AXIS_T_THETA: &str = "t_theta";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Axis {
    pub fn new(start: f64, stop: f64, points: usize) -> Self {
        Self { start, stop, points }
    }

    /// Evenly spaced, endpoints included.
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        if n == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (n - 1) as f64;
        (0..n)
            .map(|i| if i + 1 == n { self.stop } else { self.start + step * i as f64 })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Alpha {
    pub re: f64,
    pub im: f64,
}

impl From<Alpha> for Complex64 {
    fn from(a: Alpha) -> Self {
        Complex64::new(a.re, a.im)
    }
}

/// Deliberate corruption used to exercise the validation harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Scales every extracted Δ by `1 + 1e-3` before comparison.
    WrongDelta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub model: ModelParams,
    /// Sweep axes by name.
    pub axes: BTreeMap<String, Axis>,
    /// Control-parameter values (`g` or `λ`) for multi-curve figures.
    #[serde(default)]
    pub lines: Vec<f64>,
    pub t_theta: f64,
    pub alpha: Alpha,
    pub theta0: f64,
    /// Finite-difference step in θ.
    pub dtheta: f64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Worker cap; `None` uses every core.
    #[serde(default)]
    pub threads: Option<usize>,
    /// Run the Fock-space cross-checks in `validate`.
    pub oracle: bool,
    #[serde(default)]
    pub fault: Option<Fault>,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("bad override `{0}`")]
    Override(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn axes(list: &[(&str, Axis)]) -> BTreeMap<String, Axis> {
    list.iter().map(|(k, a)| (k.to_string(), *a)).collect()
}

impl RunConfig {
    /// Built-in defaults. Axis ranges not fixed by the figure captions are
    /// choices, not published values.
    pub fn defaults(experiment: Experiment) -> Self {
        let qrm = ModelParams::qrm_frequency(1.0, 0.96);
        let mut cfg = Self {
            experiment,
            model: qrm,
            axes: BTreeMap::new(),
            lines: Vec::new(),
            t_theta: 12.0,
            alpha: Alpha { re: 0.3, im: 1.0 },
            theta0: 0.0,
            dtheta: canp_core::metrology::DEFAULT_DTHETA,
            output: None,
            threads: None,
            oracle: true,
            fault: None,
        };
        match experiment {
            Experiment::Fig2a => {
                cfg.axes = axes(&[
                    (AXIS_TC, Axis::new(0.0, 4.0 * PI, 200)),
                    (AXIS_T_THETA, Axis::new(0.5, 20.0, 200)),
                ]);
            }
            Experiment::Fig2b => {
                cfg.axes = axes(&[(AXIS_TC, Axis::new(0.0, 6.0 * PI, 601))]);
                cfg.lines = vec![0.80, 0.90, 0.96, 0.98];
            }
            Experiment::Fig2bInset => {
                cfg.axes = axes(&[("g", Axis::new(0.30, 0.99, 70))]);
            }
            Experiment::Fig3a => {
                cfg.axes = axes(&[(AXIS_TC, Axis::new(0.0, 4.0 * PI, 401))]);
                cfg.lines = vec![0.90, 0.95, 0.98];
            }
            Experiment::Fig3b => {
                cfg.axes = axes(&[("g", Axis::new(0.50, 0.99, 50))]);
            }
            Experiment::LmgThreshold => {
                cfg.model = ModelParams::lmg_frequency(0.3559, 2.0);
                cfg.t_theta = 1.3;
                cfg.axes = axes(&[("lambda", Axis::new(0.05, 0.95, 91))]);
            }
            Experiment::Displacement => {
                cfg.model = ModelParams::qrm_displacement(1.0, 0.9);
                cfg.axes = axes(&[(AXIS_TC, Axis::new(0.0, 4.0 * PI, 201))]);
            }
            Experiment::Validate => {}
        }
        cfg
    }

    /// Defaults, then `file` merged key by key, then `overrides`
    /// (`("model.g", "0.96")`), then validation.
    pub fn resolve(
        experiment: Experiment,
        file: Option<&Path>,
        overrides: &[(String, String)],
    ) -> Result<Self, ConfigError> {
        let mut value = serde_json::to_value(Self::defaults(experiment))?;
        if let Some(path) = file {
            let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
                path: path.to_path_buf(),
                source,
            })?;
            let user: Value = serde_json::from_str(&text)?;
            if let Some(e) = user.get("experiment") {
                if e != &Value::String(experiment.name().into()) {
                    return Err(ConfigError::Invalid(format!(
                        "config is for experiment {e}, not {}",
                        experiment.name()
                    )));
                }
            }
            merge(&mut value, user);
        }
        for (key, raw) in overrides {
            set_path(&mut value, key, parse_scalar(raw))?;
        }
        let cfg: Self = serde_json::from_value(value)?;
        if cfg.experiment != experiment {
            return Err(ConfigError::Invalid("experiment cannot be overridden".into()));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha.into()
    }

    pub fn axis(&self, name: &str) -> &Axis {
        &self.axes[name]
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |msg: String| Err(ConfigError::Invalid(msg));
        let finite = [self.t_theta, self.alpha.re, self.alpha.im, self.theta0, self.dtheta];
        if finite.iter().any(|x| !x.is_finite()) {
            return bad("non-finite number".into());
        }
        if !(self.t_theta > 0.0) {
            return bad("t_theta must be positive".into());
        }
        if !(1e-6..=1e-2).contains(&self.dtheta) {
            return bad(format!("dtheta {} outside [1e-6, 1e-2]", self.dtheta));
        }
        if self.threads == Some(0) {
            return bad("threads must be at least 1".into());
        }
        if let Some(want) = self.experiment.variant() {
            if self.model.variant != want {
                return bad(format!(
                    "{} needs model variant {want:?}, got {:?}",
                    self.experiment.name(),
                    self.model.variant
                ));
            }
            if self.alpha().norm() < 1e-12 {
                return bad("probe amplitude must be nonzero".into());
            }
        }
        let valid_control = |x: f64| self.model.with_control(x).preparation().is_ok();
        match self.experiment {
            Experiment::Fig2b | Experiment::Fig3a => {
                if self.lines.is_empty() {
                    return bad("lines must list at least one coupling".into());
                }
            }
            Experiment::Validate => {}
            _ => {
                if !valid_control(self.model.control()) {
                    return bad("model parameters outside the normal phase".into());
                }
            }
        }
        if let Some(x) = self.lines.iter().find(|&&x| !valid_control(x)) {
            return bad(format!("line value {x} outside the normal phase"));
        }
        for name in self.experiment.axes() {
            let Some(axis) = self.axes.get(*name) else {
                return bad(format!("missing axis {name}"));
            };
            if axis.points < 2 {
                return bad(format!("axis {name} needs at least 2 points"));
            }
            if !(axis.start.is_finite() && axis.stop.is_finite() && axis.start < axis.stop) {
                return bad(format!("axis {name} must satisfy start < stop"));
            }
            let ok = match *name {
                AXIS_TC => axis.start >= 0.0,
                AXIS_T_THETA => axis.start > 0.0,
                _ => axis.values().into_iter().all(valid_control),
            };
            if !ok {
                return bad(format!("axis {name} leaves the model's validity range"));
            }
        }
        if let Some(extra) = self
            .axes
            .keys()
            .find(|k| !self.experiment.axes().contains(&k.as_str()))
        {
            return bad(format!("axis {extra} is not used by {}", self.experiment.name()));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form, ignoring the output path and the
    /// worker cap so that the hash names the data, not the run.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output = None;
        canonical.threads = None;
        let bytes = serde_json::to_vec(&canonical).expect("config serializes");
        Sha256::digest(&bytes)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) if k != "axes" => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

fn parse_scalar(raw: &str) -> Value {
    serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()))
}

fn set_path(root: &mut Value, dotted: &str, value: Value) -> Result<(), ConfigError> {
    let mut node = root;
    let parts: Vec<&str> = dotted.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(ConfigError::Override(dotted.into()));
    }
    for part in &parts[..parts.len() - 1] {
        let obj = match node {
            Value::Object(m) => m,
            Value::Null => {
                *node = Value::Object(Default::default());
                node.as_object_mut().expect("just set")
            }
            _ => return Err(ConfigError::Override(dotted.into())),
        };
        node = obj
            .entry(part.to_string())
            .or_insert(Value::Object(Default::default()));
    }
    match node {
        Value::Object(m) => {
            m.insert(parts[parts.len() - 1].to_string(), value);
            Ok(())
        }
        _ => Err(ConfigError::Override(dotted.into())),
    }
}

/// Dotted `key=value` pairs taken from the command line.
pub type Overrides = Vec<(String, String)>;

/// Splits `--a.b=value` and `--a.b value` pairs whose key is not in
/// `reserved` out of an argument list.
pub fn extract_overrides(
    args: Vec<String>,
    reserved: &[&str],
) -> Result<(Vec<String>, Overrides), ConfigError> {
    let mut rest = Vec::new();
    let mut overrides = Vec::new();
    let mut it = args.into_iter();
    while let Some(arg) = it.next() {
        let Some(body) = arg.strip_prefix("--") else {
            rest.push(arg);
            continue;
        };
        let (key, inline) = match body.split_once('=') {
            Some((k, v)) => (k.to_string(), Some(v.to_string())),
            None => (body.to_string(), None),
        };
        if key.is_empty() || reserved.contains(&key.as_str()) {
            rest.push(arg);
            continue;
        }
        let value = match inline {
            Some(v) => v,
            None => it.next().ok_or_else(|| ConfigError::Override(key.clone()))?,
        };
        overrides.push((key, value));
    }
    Ok((rest, overrides))
}
