//! Experiment configuration and its line-oriented `key = value` file format.
//!
//! Blank lines and `#` comments are ignored. Repeating a list key (`satellite`, `profile`,
//! `mode`, `estimator`, `seed`) accumulates values; the first occurrence in a file replaces
//! the built-in default list.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use inertia_core::{Disturbances, InertiaMode, Method, ProfileKind, Satellite, Sensors};
use thiserror::Error;

use crate::seed::{DEFAULT_BASE_SEED, SEED_ENV};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}:{line}: {msg}")]
    Syntax {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("invalid value for '{key}': {msg}")]
    Value { key: String, msg: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("cannot read {0}: {1}")]
    Io(String, std::io::Error),
}

#[derive(Clone, Debug, PartialEq)]
pub struct NamedSatellite {
    pub name: String,
    pub params: Satellite,
}

impl NamedSatellite {
    pub fn preset(name: &str) -> Option<Self> {
        let canonical = match name.to_ascii_lowercase().as_str() {
            "cubesat" => "CubeSat",
            "microsat" => "Microsat",
            "smallsat" | "small-sat" | "small_sat" => "SmallSat",
            _ => return None,
        };
        Some(Self {
            name: canonical.into(),
            params: Satellite::preset(name)?,
        })
    }

    pub fn defaults() -> Vec<Self> {
        ["CubeSat", "Microsat", "SmallSat"]
            .iter()
            .map(|n| Self::preset(n).expect("built-in preset"))
            .collect()
    }

    /// `name` for a preset, or `name:mass,dx,dy,dz,Ix,Iy,Iz,rw_inertia,rw_max_torque,rw_max_speed,rw_diameter`.
    pub fn parse(spec: &str) -> Result<Self, ConfigError> {
        let bad = |msg: &str| ConfigError::Value {
            key: "satellite".into(),
            msg: msg.into(),
        };
        let Some((name, values)) = spec.split_once(':') else {
            return Self::preset(spec.trim())
                .ok_or_else(|| bad(&format!("unknown preset '{spec}'")));
        };
        let v: Vec<f64> = values
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| bad(&e.to_string()))?;
        if v.len() != 11 {
            return Err(bad("custom satellite needs 11 numbers"));
        }
        let params = Satellite::from_f64(
            v[0],
            [v[1], v[2], v[3]],
            [v[4], v[5], v[6]],
            v[7],
            v[8],
            v[9],
            v[10],
        );
        params.validate().map_err(|e| bad(&e.to_string()))?;
        let name = name.trim();
        if name.is_empty() || name.contains(',') {
            return Err(bad("satellite name must be non-empty and comma-free"));
        }
        Ok(Self {
            name: name.into(),
            params,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub satellites: Vec<NamedSatellite>,
    pub profiles: Vec<ProfileKind>,
    pub modes: Vec<InertiaMode>,
    pub estimators: Vec<Method>,
    /// Seed values; each one is a repetition of every cell.
    pub seeds: Vec<u64>,
    pub base_seed: u64,
    /// s
    pub horizon: f64,
    /// s
    pub dt_ctrl: f64,
    pub sensors: Sensors,
    pub disturbances: Disturbances,
    pub window_fraction: f64,
    /// EKF initial inertia = factor × nominal.
    pub ekf_guess_factor: f64,
    pub tau_ext_known: bool,
    pub output: PathBuf,
    pub export_traces: bool,
    /// Write measured wall times into the results CSV (makes it run-dependent).
    pub record_timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            satellites: NamedSatellite::defaults(),
            profiles: ProfileKind::ALL.to_vec(),
            modes: InertiaMode::ALL.to_vec(),
            estimators: Method::ALL.to_vec(),
            seeds: (0..10).collect(),
            base_seed: DEFAULT_BASE_SEED,
            horizon: 300.0,
            dt_ctrl: 0.1,
            sensors: Sensors::default(),
            disturbances: Disturbances::default(),
            window_fraction: 0.2,
            ekf_guess_factor: 1.2,
            tau_ext_known: true,
            output: PathBuf::from("out"),
            export_traces: false,
            record_timing: false,
        }
    }
}

fn parse_bool(key: &str, v: &str) -> Result<bool, ConfigError> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(ConfigError::Value {
            key: key.into(),
            msg: format!("'{v}' is not a boolean"),
        }),
    }
}

fn parse_num<N: std::str::FromStr>(key: &str, v: &str) -> Result<N, ConfigError>
where
    N::Err: std::fmt::Display,
{
    v.parse::<N>().map_err(|e| ConfigError::Value {
        key: key.into(),
        msg: e.to_string(),
    })
}

fn value_err(key: &str) -> impl Fn(inertia_core::Error) -> ConfigError + '_ {
    move |e| ConfigError::Value {
        key: key.into(),
        msg: e.to_string(),
    }
}

impl ExperimentConfig {
    /// Defaults overridden by `path`, then by the `INERTIA_ID_SEED` environment variable.
    pub fn load(path: Option<&Path>) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError::Io(path.display().to_string(), e))?;
            cfg.apply_text(&text, &path.display().to_string())?;
        }
        if let Ok(v) = std::env::var(SEED_ENV) {
            cfg.base_seed = parse_num(SEED_ENV, v.trim())?;
        }
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str, origin: &str) -> Result<(), ConfigError> {
        let mut seen = HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Syntax {
                    path: origin.into(),
                    line: i + 1,
                    msg: "expected key=value".into(),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            let first = seen.insert(key.to_string());
            self.set(key, value, first).map_err(|e| match e {
                ConfigError::Value { key, msg } => ConfigError::Syntax {
                    path: origin.into(),
                    line: i + 1,
                    msg: format!("{key}: {msg}"),
                },
                other => other,
            })?;
        }
        self.validate()
    }

    /// Applies one key. `first` marks the first occurrence, which resets list keys.
    pub fn set(&mut self, key: &str, value: &str, first: bool) -> Result<(), ConfigError> {
        macro_rules! push {
            ($list:expr, $item:expr) => {{
                if first {
                    $list.clear();
                }
                $list.push($item);
            }};
        }
        match key {
            "satellite" => push!(self.satellites, NamedSatellite::parse(value)?),
            "profile" => push!(self.profiles, value.parse().map_err(value_err(key))?),
            "mode" => push!(self.modes, value.parse().map_err(value_err(key))?),
            "estimator" => push!(self.estimators, value.parse().map_err(value_err(key))?),
            "seed" => push!(self.seeds, parse_num(key, value)?),
            "seeds" => self.seeds = (0..parse_num::<u64>(key, value)?).collect(),
            "base_seed" => self.base_seed = parse_num(key, value)?,
            "horizon" => self.horizon = parse_num(key, value)?,
            "dt_ctrl" => self.dt_ctrl = parse_num(key, value)?,
            "gyro_noise_std" => self.sensors.gyro_noise_std = parse_num(key, value)?,
            "wheel_speed_noise_std" => self.sensors.wheel_speed_noise_std = parse_num(key, value)?,
            "noise" => self.sensors.enabled = parse_bool(key, value)?,
            "disturbance" => self.disturbances.enabled = parse_bool(key, value)?,
            "orbital_rate" => self.disturbances.orbital_rate = parse_num(key, value)?,
            "srp_force" => self.disturbances.srp_force = parse_num(key, value)?,
            "cop_offset" => self.disturbances.cop_offset = parse_num(key, value)?,
            "window_fraction" => self.window_fraction = parse_num(key, value)?,
            "ekf_guess_factor" => self.ekf_guess_factor = parse_num(key, value)?,
            "tau_ext_known" => self.tau_ext_known = parse_bool(key, value)?,
            "out" => self.output = PathBuf::from(value),
            "export_traces" => self.export_traces = parse_bool(key, value)?,
            "timing" => self.record_timing = parse_bool(key, value)?,
            _ => {
                return Err(ConfigError::Value {
                    key: key.into(),
                    msg: "unknown key".into(),
                });
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: &str| Err(ConfigError::Invalid(m.into()));
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return invalid("horizon must be positive");
        }
        if !(self.dt_ctrl > 0.0 && self.dt_ctrl < self.horizon) {
            return invalid("dt_ctrl must be positive and shorter than the horizon");
        }
        if self.satellites.is_empty()
            || self.profiles.is_empty()
            || self.modes.is_empty()
            || self.estimators.is_empty()
            || self.seeds.is_empty()
        {
            return invalid("every grid list needs at least one entry");
        }
        let names: HashSet<_> = self
            .satellites
            .iter()
            .map(|s| s.name.to_ascii_lowercase())
            .collect();
        if names.len() != self.satellites.len() {
            return invalid("duplicate satellite names");
        }
        if !(self.sensors.gyro_noise_std >= 0.0 && self.sensors.wheel_speed_noise_std >= 0.0) {
            return invalid("noise standard deviations must be non-negative");
        }
        let d = &self.disturbances;
        if !(d.orbital_rate >= 0.0 && d.srp_force >= 0.0 && d.cop_offset >= 0.0) {
            return invalid("disturbance magnitudes must be non-negative");
        }
        if !(self.window_fraction > 0.0 && self.window_fraction <= 1.0) {
            return invalid("window_fraction must lie in (0, 1]");
        }
        if !(self.ekf_guess_factor > 0.0) {
            return invalid("ekf_guess_factor must be positive");
        }
        Ok(())
    }

    /// Number of records a full run produces.
    pub fn grid_size(&self) -> usize {
        self.satellites.len()
            * self.profiles.len()
            * self.modes.len()
            * self.estimators.len()
            * self.seeds.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_give_full_grid() {
        let c = ExperimentConfig::default();
        c.validate().unwrap();
        assert_eq!(c.grid_size(), 3 * 8 * 4 * 2 * 10);
    }

    #[test]
    fn file_lists_replace_defaults() {
        let mut c = ExperimentConfig::default();
        c.apply_text(
            "# comment\nsatellite = cubesat\nsatellite=SmallSat\nprofile=chirp\nmode=static\nmode=periodic\nestimator=ls\nseeds=3\nhorizon=60 # trailing\nnoise=false\n",
            "test.cfg",
        )
        .unwrap();
        assert_eq!(c.satellites.len(), 2);
        assert_eq!(c.satellites[1].name, "SmallSat");
        assert_eq!(c.profiles, vec![ProfileKind::Chirp]);
        assert_eq!(c.modes, vec![InertiaMode::Static, InertiaMode::Periodic]);
        assert_eq!(c.estimators, vec![Method::Ls]);
        assert_eq!(c.seeds, vec![0, 1, 2]);
        assert_eq!(c.horizon, 60.0);
        assert!(!c.sensors.enabled);
        assert_eq!(c.grid_size(), 2 * 2 * 3);
    }

    #[test]
    fn explicit_seed_list() {
        let mut c = ExperimentConfig::default();
        c.apply_text("seed=7\nseed=11\n", "x").unwrap();
        assert_eq!(c.seeds, vec![7, 11]);
    }

    #[test]
    fn custom_satellite() {
        let s =
            NamedSatellite::parse("Tiny:4,0.1,0.1,0.2,0.02,0.02,0.01,1e-5,0.001,500,0.03").unwrap();
        assert_eq!(s.name, "Tiny");
        assert_eq!(s.params.rw_max_speed, 500.0);
        assert!(NamedSatellite::parse("Bad:4,0.1").is_err());
        assert!(NamedSatellite::parse("Bad:4,0.1,0.1,0.2,1,1,3,1e-5,0.001,500,0.03").is_err());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let mut c = ExperimentConfig::default();
        let e = c
            .apply_text("horizon=300\nprofile=square\n", "f.cfg")
            .unwrap_err();
        assert!(e.to_string().starts_with("f.cfg:2:"), "{e}");
        let e = c.apply_text("just words\n", "f.cfg").unwrap_err();
        assert!(matches!(e, ConfigError::Syntax { line: 1, .. }));
        assert!(ExperimentConfig::default()
            .apply_text("colour=blue", "f")
            .is_err());
        assert!(ExperimentConfig::default()
            .apply_text("horizon=-3", "f")
            .is_err());
    }
}
