//! Run configuration: a flat JSON object.
//!
//! ```json
//! {
//!   "preset": "testcase1",
//!   "cells": 200,
//!   "dt": 0.005,
//!   "out": "runs/tc1"
//! }
//! ```
//!
//! Without `preset`, every model key (`a`, `b`, `alpha0`, `beta0`,
//! `alpha1`, `beta1`, `R`, `L0`, `t_final` and one of `u_init_coeffs` or
//! `u_init_x`/`u_init_u`) must be given. Keys given alongside a preset
//! override it.

use std::fmt;
use std::path::PathBuf;

use oxide_fv::{InitialMode, InitialProfile, ModelParams, Preset, SolverOptions, TimeGrid};
use serde::{Deserialize, Serialize};

pub const DEFAULT_CELLS: usize = 100;
pub const DEFAULT_DT: f64 = 1e-2;
pub const DEFAULT_LEVELS: usize = 3;
pub const DEFAULT_REF_LEVEL: usize = 4;
pub const DEFAULT_CONVERGE_T_FINAL: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Simulate,
    Tw,
    Energy,
    Converge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    /// 1-based line in the config text, when one applies.
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Keys as written in the file; everything optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta1: Option<f64>,
    #[serde(rename = "R", skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(rename = "L0", skip_serializing_if = "Option::is_none")]
    pub l0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u_init_coeffs: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u_init_x: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u_init_u: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cells: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_final: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub newton_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_newton_iters: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub homotopy_steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_homotopy_steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width_floor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub experiment: Option<Experiment>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levels: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ref_level: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converge_t_final: Option<f64>,
}

/// A fully resolved and validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub preset: Option<Preset>,
    pub params: ModelParams,
    pub cells: usize,
    pub dt: f64,
    pub t_final: f64,
    pub initial_mode: InitialMode,
    pub solver: SolverOptions,
    pub out: PathBuf,
    pub experiment: Option<Experiment>,
    pub phi: Option<String>,
    pub levels: usize,
    pub ref_level: usize,
    pub converge_t_final: f64,
}

pub const PHI_NAMES: [&str; 4] = ["quadratic", "quartic", "excess", "entropy"];

pub fn mode_name(mode: InitialMode) -> &'static str {
    match mode {
        InitialMode::CellAverage => "average",
        InitialMode::CenterSample => "sample",
    }
}

pub fn parse_mode(name: &str) -> Option<InitialMode> {
    match name {
        "average" => Some(InitialMode::CellAverage),
        "sample" => Some(InitialMode::CenterSample),
        _ => None,
    }
}

/// Line of the first `"key":` in `text`.
fn key_line(text: &str, key: &str) -> Option<usize> {
    let quoted = format!("\"{key}\"");
    text.lines().enumerate().find_map(|(k, line)| {
        let pos = line.find(&quoted)?;
        line[pos + quoted.len()..].trim_start().starts_with(':').then_some(k + 1)
    })
}

pub fn parse_raw(text: &str) -> Result<RawConfig, ConfigError> {
    serde_json::from_str(text).map_err(|e| ConfigError {
        line: (e.line() > 0).then_some(e.line()),
        message: e.to_string(),
    })
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    resolve(&parse_raw(text)?, text)
}

fn err(text: &str, key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line: key_line(text, key),
        message: message.into(),
    }
}

/// Turns raw keys into a [`RunConfig`]. `text` is only used to point
/// error messages at the offending line.
pub fn resolve(raw: &RawConfig, text: &str) -> Result<RunConfig, ConfigError> {
    let preset = match &raw.preset {
        Some(name) => Some(Preset::from_name(name).ok_or_else(|| {
            err(
                text,
                "preset",
                format!("unknown preset `{name}` (expected testcase1, testcase2 or testcase3)"),
            )
        })?),
        None => None,
    };
    let base = preset.map(Preset::params);
    let pick = |key: &str, given: Option<f64>, from_preset: Option<f64>| {
        given
            .or(from_preset)
            .ok_or_else(|| err(text, key, format!("missing key `{key}` (no preset given)")))
    };
    let b = base.as_ref();
    let mut params = ModelParams {
        a: pick("a", raw.a, b.map(|p| p.a))?,
        b: pick("b", raw.b, b.map(|p| p.b))?,
        alpha0: pick("alpha0", raw.alpha0, b.map(|p| p.alpha0))?,
        beta0: pick("beta0", raw.beta0, b.map(|p| p.beta0))?,
        alpha1: pick("alpha1", raw.alpha1, b.map(|p| p.alpha1))?,
        beta1: pick("beta1", raw.beta1, b.map(|p| p.beta1))?,
        r: pick("R", raw.r, b.map(|p| p.r))?,
        l0: pick("L0", raw.l0, b.map(|p| p.l0))?,
        u_init: InitialProfile::constant(0.0),
    };
    params.u_init = match (&raw.u_init_coeffs, &raw.u_init_x, &raw.u_init_u) {
        (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
            return Err(err(
                text,
                "u_init_coeffs",
                "give either `u_init_coeffs` or `u_init_x`/`u_init_u`, not both",
            ))
        }
        (Some([c1, c2, c3]), None, None) => InitialProfile::Exponential {
            c1: *c1,
            c2: *c2,
            c3: *c3,
        },
        (None, Some(x), Some(u)) => InitialProfile::Tabulated {
            x: x.clone(),
            u: u.clone(),
        },
        (None, Some(_), None) => return Err(err(text, "u_init_x", "`u_init_x` needs `u_init_u`")),
        (None, None, Some(_)) => return Err(err(text, "u_init_u", "`u_init_u` needs `u_init_x`")),
        (None, None, None) => match &base {
            Some(p) => p.u_init.clone(),
            None => {
                return Err(err(
                    text,
                    "u_init_coeffs",
                    "missing initial profile: give `u_init_coeffs` or `u_init_x`/`u_init_u`",
                ))
            }
        },
    };
    params.validate().map_err(|e| {
        let key = match &e {
            oxide_fv::Error::NonPositive { name, .. } | oxide_fv::Error::NonFinite { name, .. } => {
                if name.starts_with("u_init") {
                    "u_init_coeffs"
                } else {
                    name
                }
            }
            _ => {
                if raw.u_init_x.is_some() {
                    "u_init_x"
                } else {
                    "u_init_coeffs"
                }
            }
        };
        err(text, key, e.to_string())
    })?;

    let cells = raw.cells.unwrap_or(DEFAULT_CELLS);
    if cells == 0 {
        return Err(err(text, "cells", "`cells` must be at least 1"));
    }
    let dt = raw.dt.unwrap_or(DEFAULT_DT);
    if !(dt.is_finite() && dt > 0.0) {
        return Err(err(text, "dt", format!("`dt` must be strictly positive, got {dt}")));
    }
    let t_final = raw
        .t_final
        .or(preset.map(Preset::horizon))
        .ok_or_else(|| err(text, "t_final", "missing key `t_final` (no preset given)"))?;
    if !(t_final.is_finite() && t_final > 0.0) {
        return Err(err(text, "t_final", format!("`t_final` must be strictly positive, got {t_final}")));
    }
    TimeGrid::from_horizon(t_final, dt).map_err(|e| err(text, "dt", e.to_string()))?;
    let initial_mode = match &raw.initial_mode {
        Some(name) => parse_mode(name).ok_or_else(|| {
            err(
                text,
                "initial_mode",
                format!("unknown initial mode `{name}` (expected average or sample)"),
            )
        })?,
        None => InitialMode::CellAverage,
    };

    let mut solver = SolverOptions::for_params(&params);
    if let Some(v) = raw.newton_tol {
        solver.newton_tol = v;
    }
    if let Some(v) = raw.max_newton_iters {
        solver.max_newton_iters = v;
    }
    if let Some(v) = raw.homotopy_steps {
        solver.homotopy_steps = v;
    }
    if let Some(v) = raw.max_homotopy_steps {
        solver.max_homotopy_steps = v;
    }
    if let Some(v) = raw.width_floor {
        solver.width_floor = v;
    }
    solver.validate().map_err(|e| {
        let key = match &e {
            oxide_fv::Error::NonPositive { name, .. } | oxide_fv::Error::NonFinite { name, .. } => name,
            _ => "homotopy_steps",
        };
        err(text, key, e.to_string())
    })?;

    if let Some(phi) = &raw.phi {
        if !PHI_NAMES.contains(&phi.as_str()) {
            return Err(err(
                text,
                "phi",
                format!("unknown density `{phi}` (expected one of {})", PHI_NAMES.join(", ")),
            ));
        }
    }
    let levels = raw.levels.unwrap_or(DEFAULT_LEVELS);
    let ref_level = raw.ref_level.unwrap_or(DEFAULT_REF_LEVEL);
    if ref_level <= levels {
        return Err(err(
            text,
            "ref_level",
            format!("`ref_level` ({ref_level}) must exceed `levels` ({levels})"),
        ));
    }
    let converge_t_final = raw.converge_t_final.unwrap_or(DEFAULT_CONVERGE_T_FINAL);
    if !(converge_t_final.is_finite() && converge_t_final > 0.0) {
        return Err(err(text, "converge_t_final", "`converge_t_final` must be strictly positive"));
    }

    Ok(RunConfig {
        preset,
        params,
        cells,
        dt,
        t_final,
        initial_mode,
        solver,
        out: raw.out.clone().unwrap_or_else(|| PathBuf::from("out")),
        experiment: raw.experiment,
        phi: raw.phi.clone(),
        levels,
        ref_level,
        converge_t_final,
    })
}

impl RunConfig {
    /// Every resolved value written out explicitly.
    pub fn to_raw(&self) -> RawConfig {
        let p = &self.params;
        let (coeffs, xs, us) = match &p.u_init {
            InitialProfile::Exponential { c1, c2, c3 } => (Some([*c1, *c2, *c3]), None, None),
            InitialProfile::Tabulated { x, u } => (None, Some(x.clone()), Some(u.clone())),
        };
        RawConfig {
            preset: self.preset.map(|p| p.name().to_string()),
            a: Some(p.a),
            b: Some(p.b),
            alpha0: Some(p.alpha0),
            beta0: Some(p.beta0),
            alpha1: Some(p.alpha1),
            beta1: Some(p.beta1),
            r: Some(p.r),
            l0: Some(p.l0),
            u_init_coeffs: coeffs,
            u_init_x: xs,
            u_init_u: us,
            cells: Some(self.cells),
            dt: Some(self.dt),
            t_final: Some(self.t_final),
            initial_mode: Some(mode_name(self.initial_mode).to_string()),
            newton_tol: Some(self.solver.newton_tol),
            max_newton_iters: Some(self.solver.max_newton_iters),
            homotopy_steps: Some(self.solver.homotopy_steps),
            max_homotopy_steps: Some(self.solver.max_homotopy_steps),
            width_floor: Some(self.solver.width_floor),
            out: Some(self.out.clone()),
            experiment: self.experiment,
            phi: self.phi.clone(),
            levels: Some(self.levels),
            ref_level: Some(self.ref_level),
            converge_t_final: Some(self.converge_t_final),
        }
    }
}

/// Pretty-printed JSON with one key per line.
pub fn render(config: &RunConfig) -> String {
    let mut text = serde_json::to_string_pretty(&config.to_raw()).expect("config serializes");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_testcase1() {
        let c = parse_config(r#"{"preset": "testcase1"}"#).unwrap();
        let p = &c.params;
        assert_eq!(
            (p.a, p.b, p.alpha0, p.beta0, p.alpha1, p.beta1, p.r, p.l0),
            (1.0, 1.0, 1.5, 1.0, 0.5, 4.0, 2.0, 1.0)
        );
        assert_eq!(c.t_final, 20.0);
        assert_eq!(c.cells, DEFAULT_CELLS);
    }

    #[test]
    fn preset_testcase3() {
        let c = parse_config(r#"{"preset": "testcase3"}"#).unwrap();
        let p = &c.params;
        assert_eq!(
            (p.a, p.b, p.alpha0, p.beta0, p.alpha1, p.beta1, p.r, p.l0),
            (1.0, 1.0, 4.0, 1.0, 3.0, 1.5, 2.0, 1.0)
        );
        assert_eq!(c.t_final, 10.0);
    }

    #[test]
    fn negative_parameter_points_at_its_line() {
        let text = "{\n  \"preset\": \"testcase1\",\n  \"a\": -1\n}";
        let e = parse_config(text).unwrap_err();
        assert_eq!(e.line, Some(3));
        assert!(e.message.contains("strictly positive"), "{e}");
    }

    #[test]
    fn unknown_key_is_rejected() {
        let e = parse_config("{\n  \"preset\": \"testcase1\",\n  \"gamma\": 1\n}").unwrap_err();
        assert_eq!(e.line, Some(3));
        assert!(e.message.contains("unknown field"), "{e}");
    }

    #[test]
    fn malformed_number() {
        let e = parse_config("{\n  \"a\": 1.2.3\n}").unwrap_err();
        assert_eq!(e.line, Some(2));
    }

    #[test]
    fn missing_keys_without_preset() {
        let e = parse_config("{\n  \"a\": 1\n}").unwrap_err();
        assert!(e.message.contains("missing key `b`"), "{e}");
    }

    #[test]
    fn explicit_model_without_preset() {
        let text = r#"{
            "a": 1, "b": 1, "alpha0": 1.5, "beta0": 1, "alpha1": 0.5, "beta1": 4,
            "R": 2, "L0": 1, "u_init_coeffs": [1, -0.5, 2], "t_final": 1
        }"#;
        let c = parse_config(text).unwrap();
        assert_eq!(c.params, ModelParams::testcase1());
        assert_eq!(c.preset, None);
    }

    #[test]
    fn tabulated_profile() {
        let text = r#"{"preset": "testcase1", "u_init_x": [0, 1], "u_init_u": [1, 2]}"#;
        let c = parse_config(text).unwrap();
        assert!(matches!(c.params.u_init, InitialProfile::Tabulated { .. }));
        assert!(parse_config(r#"{"preset": "testcase1", "u_init_x": [0, 1]}"#).is_err());
        assert!(parse_config(r#"{"preset": "testcase1", "u_init_x": [0, 0], "u_init_u": [1, 2]}"#).is_err());
    }

    #[test]
    fn bad_enumerations() {
        for text in [
            r#"{"preset": "testcase9"}"#,
            r#"{"preset": "testcase1", "initial_mode": "median"}"#,
            r#"{"preset": "testcase1", "phi": "cubic"}"#,
            r#"{"preset": "testcase1", "experiment": "plot"}"#,
            r#"{"preset": "testcase1", "levels": 4, "ref_level": 4}"#,
            r#"{"preset": "testcase1", "cells": 0}"#,
            r#"{"preset": "testcase1", "dt": 0}"#,
            r#"{"preset": "testcase1", "width_floor": -1}"#,
        ] {
            assert!(parse_config(text).is_err(), "{text}");
        }
    }

    #[test]
    fn render_round_trip_of_preset() {
        let c = parse_config(r#"{"preset": "testcase2", "dt": 0.001, "initial_mode": "sample"}"#).unwrap();
        assert_eq!(parse_config(&render(&c)).unwrap(), c);
    }
}
