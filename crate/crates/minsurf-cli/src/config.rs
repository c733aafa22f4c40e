//! Run configuration: a flat JSON file whose keys can be overridden one to
//! one by command-line flags (`--key value`). Unknown keys are rejected
//! before any compute.

use std::collections::BTreeMap;

use minsurf::preset::{Preset, PresetParams};
use minsurf::solve::{SolveConfig, SolveMethod};
use serde_json::Value;

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub n: usize,
    pub m: usize,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub resolution: usize,
    pub preset: String,
    pub amp: f64,
    pub c: f64,
    pub freq: f64,
    pub seed: u64,
    pub waves: usize,
    pub scale: f64,
    pub matrix: Vec<f64>,
    pub offset: Vec<f64>,
    pub boundary_scale: f64,
    pub method: String,
    pub tol: f64,
    pub max_iter: usize,
    pub dt_factor: Option<f64>,
    pub continuation_steps: usize,
    pub damping: f64,
    pub initial: String,
    pub c_check: f64,
    pub solved_tol: f64,
    pub audit_gradient_bound: bool,
    pub outdir: String,
    pub levels: Vec<usize>,
    pub fields: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: 2,
            m: 1,
            lower: vec![-1.0, -1.0, -1.0],
            upper: vec![1.0, 1.0, 1.0],
            resolution: 33,
            preset: "scherk".into(),
            amp: 0.1,
            c: 0.3,
            freq: 1.0,
            seed: 1,
            waves: 4,
            scale: 1.0,
            matrix: Vec::new(),
            offset: Vec::new(),
            boundary_scale: 1.0,
            method: "newton".into(),
            tol: 1e-8,
            max_iter: 200_000,
            dt_factor: None,
            continuation_steps: 4,
            damping: 0.5,
            initial: "harmonic".into(),
            c_check: 10.0,
            solved_tol: 1e-6,
            audit_gradient_bound: false,
            outdir: "out".into(),
            levels: Vec::new(),
            fields: None,
        }
    }
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

const KNOWN_KEYS: &[&str] = &[
    "n",
    "m",
    "lower",
    "upper",
    "resolution",
    "preset",
    "amp",
    "c",
    "freq",
    "seed",
    "waves",
    "scale",
    "matrix",
    "offset",
    "boundary_scale",
    "method",
    "tol",
    "max_iter",
    "dt_factor",
    "continuation_steps",
    "damping",
    "initial",
    "c_check",
    "solved_tol",
    "audit_gradient_bound",
    "outdir",
    "levels",
    "fields",
];

impl RunConfig {
    /// Parse a config file (if any) and apply `--key value` overrides.
    pub fn load(
        path: Option<&str>,
        overrides: &[(String, String)],
    ) -> Result<RunConfig, ConfigError> {
        let mut map: BTreeMap<String, Value> = BTreeMap::new();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)
                .map_err(|e| err(format!("cannot read config {path}: {e}")))?;
            let parsed: Value = serde_json::from_str(&text)
                .map_err(|e| err(format!("config {path} is not valid JSON: {e}")))?;
            let obj = parsed
                .as_object()
                .ok_or_else(|| err("config root must be a JSON object"))?;
            for (k, v) in obj {
                map.insert(k.clone(), v.clone());
            }
        }
        for (k, raw) in overrides {
            // Flag values are JSON literals where they parse as such,
            // otherwise plain strings ("--preset scherk").
            let v = serde_json::from_str::<Value>(raw).unwrap_or(Value::String(raw.clone()));
            map.insert(k.clone(), v);
        }
        RunConfig::from_map(map)
    }

    fn from_map(map: BTreeMap<String, Value>) -> Result<RunConfig, ConfigError> {
        for key in map.keys() {
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(err(format!("unknown config key: {key}")));
            }
        }
        let mut cfg = RunConfig::default();
        let get_f64 = |v: &Value, key: &str| {
            v.as_f64()
                .ok_or_else(|| err(format!("key {key} must be a number")))
        };
        let get_usize = |v: &Value, key: &str| {
            v.as_u64()
                .map(|x| x as usize)
                .ok_or_else(|| err(format!("key {key} must be a nonnegative integer")))
        };
        for (key, v) in &map {
            match key.as_str() {
                "n" => cfg.n = get_usize(v, key)?,
                "m" => cfg.m = get_usize(v, key)?,
                "resolution" => cfg.resolution = get_usize(v, key)?,
                "max_iter" => cfg.max_iter = get_usize(v, key)?,
                "continuation_steps" => cfg.continuation_steps = get_usize(v, key)?,
                "waves" => cfg.waves = get_usize(v, key)?,
                "seed" => {
                    cfg.seed = v
                        .as_u64()
                        .ok_or_else(|| err("key seed must be a nonnegative integer"))?
                }
                "amp" => cfg.amp = get_f64(v, key)?,
                "c" => cfg.c = get_f64(v, key)?,
                "freq" => cfg.freq = get_f64(v, key)?,
                "scale" => cfg.scale = get_f64(v, key)?,
                "boundary_scale" => cfg.boundary_scale = get_f64(v, key)?,
                "tol" => cfg.tol = get_f64(v, key)?,
                "damping" => cfg.damping = get_f64(v, key)?,
                "c_check" => cfg.c_check = get_f64(v, key)?,
                "solved_tol" => cfg.solved_tol = get_f64(v, key)?,
                "dt_factor" => {
                    cfg.dt_factor = if v.is_null() {
                        None
                    } else {
                        Some(get_f64(v, key)?)
                    }
                }
                "audit_gradient_bound" => {
                    cfg.audit_gradient_bound = v
                        .as_bool()
                        .ok_or_else(|| err("key audit_gradient_bound must be a bool"))?
                }
                "preset" => cfg.preset = string_of(v, key)?,
                "method" => cfg.method = string_of(v, key)?,
                "initial" => cfg.initial = string_of(v, key)?,
                "outdir" => cfg.outdir = string_of(v, key)?,
                "fields" => cfg.fields = Some(string_of(v, key)?),
                "lower" => cfg.lower = f64_array(v, key)?,
                "upper" => cfg.upper = f64_array(v, key)?,
                "matrix" => cfg.matrix = f64_array(v, key)?,
                "offset" => cfg.offset = f64_array(v, key)?,
                "levels" => {
                    cfg.levels = v
                        .as_array()
                        .ok_or_else(|| err("key levels must be an array"))?
                        .iter()
                        .map(|x| {
                            x.as_u64()
                                .map(|u| u as usize)
                                .ok_or_else(|| err("levels entries must be integers"))
                        })
                        .collect::<Result<_, _>>()?
                }
                _ => unreachable!("unknown keys rejected above"),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if !(2..=3).contains(&self.n) {
            return Err(err(format!("n = {} unsupported (need 2 or 3)", self.n)));
        }
        if self.resolution < 5 {
            return Err(err(format!(
                "resolution too coarse: {} (need >= 5)",
                self.resolution
            )));
        }
        if self.lower.len() < self.n || self.upper.len() < self.n {
            return Err(err("lower/upper must have at least n entries"));
        }
        if !matches!(self.method.as_str(), "newton" | "mcf") {
            return Err(err(format!(
                "method must be newton or mcf, got {}",
                self.method
            )));
        }
        if !matches!(self.initial.as_str(), "harmonic" | "preset") {
            return Err(err(format!(
                "initial must be harmonic or preset, got {}",
                self.initial
            )));
        }
        Ok(())
    }

    pub fn domain(&self) -> Result<minsurf::GridDomain, ConfigError> {
        self.domain_at(self.resolution)
    }

    pub fn domain_at(&self, resolution: usize) -> Result<minsurf::GridDomain, ConfigError> {
        let res = vec![resolution; self.n];
        minsurf::GridDomain::new(self.n, &self.lower[..self.n], &self.upper[..self.n], &res)
            .map_err(|e| err(format!("{e}")))
    }

    pub fn build_preset(&self) -> Result<Preset, ConfigError> {
        let params = PresetParams {
            n: self.n,
            m: self.m,
            amp: self.amp,
            c: self.c,
            freq: self.freq,
            seed: self.seed,
            waves: self.waves,
            scale: self.scale,
            matrix: self.matrix.clone(),
            offset: self.offset.clone(),
        };
        Preset::parse(&self.preset, &params).map_err(|e| err(format!("{e}")))
    }

    pub fn solver_config(&self) -> SolveConfig {
        SolveConfig {
            method: if self.method == "mcf" {
                SolveMethod::Mcf
            } else {
                SolveMethod::Newton
            },
            tol: self.tol,
            max_iter: self.max_iter,
            dt_factor: self.dt_factor,
            continuation_steps: self.continuation_steps,
            damping: self.damping,
        }
    }

    pub fn audit_config(&self) -> minsurf::audit::AuditConfig {
        minsurf::audit::AuditConfig {
            c_check: self.c_check,
            solved_tol: self.solved_tol,
        }
    }

    /// Output directory with the `MINSURF_OUTDIR` environment override
    /// (flags still win, since they were merged before this call).
    pub fn resolve_outdir(&self, flag_was_set: bool) -> String {
        if !flag_was_set {
            if let Ok(env) = std::env::var("MINSURF_OUTDIR") {
                if !env.is_empty() {
                    return env;
                }
            }
        }
        self.outdir.clone()
    }
}

fn string_of(v: &Value, key: &str) -> Result<String, ConfigError> {
    v.as_str()
        .map(|s| s.to_string())
        .ok_or_else(|| err(format!("key {key} must be a string")))
}

fn f64_array(v: &Value, key: &str) -> Result<Vec<f64>, ConfigError> {
    v.as_array()
        .ok_or_else(|| err(format!("key {key} must be an array of numbers")))?
        .iter()
        .map(|x| {
            x.as_f64()
                .ok_or_else(|| err(format!("key {key} entries must be numbers")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_rejected() {
        let mut map = BTreeMap::new();
        map.insert("resolutoin".to_string(), Value::from(33));
        assert!(RunConfig::from_map(map).is_err());
    }

    #[test]
    fn overrides_apply() {
        let cfg = RunConfig::load(
            None,
            &[
                ("resolution".into(), "65".into()),
                ("preset".into(), "zero".into()),
            ],
        )
        .unwrap();
        assert_eq!(cfg.resolution, 65);
        assert_eq!(cfg.preset, "zero");
    }

    #[test]
    fn coarse_resolution_rejected() {
        let e = RunConfig::load(None, &[("resolution".into(), "3".into())]).unwrap_err();
        assert!(e.0.contains("too coarse"), "{}", e.0);
    }
}
