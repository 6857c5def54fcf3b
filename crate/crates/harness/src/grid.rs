//! The run grid: one simulation per (satellite, profile, mode, seed), scored by every estimator.

use std::path::{Path, PathBuf};
use std::time::Instant;

use inertia_core::ekf::{run_filter, EkfConfig};
use inertia_core::metrics::{normalized_error, sliding_window_error};
use inertia_core::{
    generate, ls, simulate::simulate, Estimate, InertiaMode, Method, ProfileKind, Schedule, Trace,
    Vector3,
};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, NamedSatellite};
use crate::seed::derive_seed;
use crate::trace_io;

#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub satellite: String,
    pub profile: String,
    pub inertia_mode: String,
    pub estimator: String,
    /// Seed value from the configuration (not the derived run seed).
    pub seed: u64,
    /// Normalized error as a fraction; `None` when the run failed.
    pub error: Option<f64>,
    pub cond_number: Option<f64>,
    /// s
    pub wall_time: Option<f64>,
    pub failure: Option<String>,
}

impl RunRecord {
    pub fn failed(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridOutput {
    /// Sorted in grid order.
    pub records: Vec<RunRecord>,
}

impl GridOutput {
    pub fn failures(&self) -> usize {
        self.records.iter().filter(|r| r.failed()).count()
    }
}

/// Identifies one simulated run inside the grid.
#[derive(Clone, Copy, Debug)]
pub struct Cell<'a> {
    pub satellite: &'a NamedSatellite,
    pub profile: ProfileKind,
    pub mode: InertiaMode,
    pub seed: u64,
}

impl Cell<'_> {
    pub fn run_seed(&self, base: u64) -> u64 {
        derive_seed(
            base,
            &self.satellite.name,
            self.profile.name(),
            self.mode.name(),
            self.seed,
        )
    }

    /// File stem used for exported traces.
    pub fn stem(&self) -> String {
        format!(
            "{}_{}_{}_{}",
            self.satellite.name,
            self.profile.name(),
            self.mode.name(),
            self.seed
        )
    }
}

/// Generates the profile and simulates one cell.
pub fn simulate_cell(cfg: &ExperimentConfig, cell: &Cell) -> inertia_core::Result<Trace> {
    let params = &cell.satellite.params;
    let run_seed = cell.run_seed(cfg.base_seed);
    let profile = generate(
        cell.profile,
        cfg.horizon,
        cfg.dt_ctrl,
        params.rw_max_torque,
        run_seed,
    )?;
    let schedule = Schedule::new(cell.mode, params.inertia_nominal, cfg.horizon);
    simulate(
        params,
        &schedule,
        &profile,
        &cfg.disturbances,
        &cfg.sensors,
        run_seed,
    )
}

pub fn ekf_config(cfg: &ExperimentConfig, satellite: &NamedSatellite) -> EkfConfig<f64> {
    let p = &satellite.params;
    let mut c = EkfConfig::with_defaults(
        &p.inertia_nominal,
        p.rw_inertia,
        &cfg.sensors,
        cfg.dt_ctrl,
        cfg.ekf_guess_factor,
    );
    c.use_tau_ext = cfg.tau_ext_known;
    c
}

pub fn estimate(
    cfg: &ExperimentConfig,
    satellite: &NamedSatellite,
    method: Method,
    trace: &Trace,
) -> inertia_core::Result<Estimate> {
    match method {
        Method::Ls => ls::estimate(trace, cfg.tau_ext_known),
        Method::Ekf => run_filter(trace, &ekf_config(cfg, satellite)),
    }
}

/// Final-sample error for static inertia, sliding-window error for the dynamic modes.
///
/// A constant LS estimate is compared against the time-varying truth inside the window.
pub fn score(
    mode: InertiaMode,
    est: &Estimate,
    truth: &[Vector3<f64>],
    window_fraction: f64,
) -> inertia_core::Result<f64> {
    let last = truth
        .last()
        .ok_or_else(|| inertia_core::Error::Input("empty trace".into()))?;
    if !mode.is_dynamic() {
        return normalized_error(&est.inertia_hat, last);
    }
    match &est.trajectory {
        Some(traj) => sliding_window_error(&traj.inertia, truth, window_fraction),
        None => {
            let constant = vec![est.inertia_hat; truth.len()];
            sliding_window_error(&constant, truth, window_fraction)
        }
    }
}

fn run_cell(cfg: &ExperimentConfig, cell: &Cell, trace_dir: Option<&Path>) -> Vec<RunRecord> {
    let record = |method: Method| RunRecord {
        satellite: cell.satellite.name.clone(),
        profile: cell.profile.name().into(),
        inertia_mode: cell.mode.name().into(),
        estimator: method.name().into(),
        seed: cell.seed,
        error: None,
        cond_number: None,
        wall_time: None,
        failure: None,
    };
    let started = Instant::now();
    let trace = match simulate_cell(cfg, cell) {
        Ok(t) => t,
        Err(e) => {
            return cfg
                .estimators
                .iter()
                .map(|&m| RunRecord {
                    failure: Some(format!("simulation: {e}")),
                    ..record(m)
                })
                .collect();
        }
    };
    let sim_time = started.elapsed().as_secs_f64();
    let truth = trace.inertia_truth();
    let mut export_failure = None;
    if let Some(dir) = trace_dir {
        if let Err(e) = trace_io::write_trace(&dir.join(format!("{}.csv", cell.stem())), &trace) {
            export_failure = Some(format!("trace export: {e}"));
        }
    }

    cfg.estimators
        .iter()
        .map(|&method| {
            let mut r = record(method);
            let t0 = Instant::now();
            let outcome = estimate(cfg, cell.satellite, method, &trace).and_then(|est| {
                let err = score(cell.mode, &est, &truth, cfg.window_fraction)?;
                Ok((est, err))
            });
            if cfg.record_timing {
                r.wall_time = Some(sim_time + t0.elapsed().as_secs_f64());
            }
            match outcome {
                Ok((est, err)) if err.is_finite() => {
                    r.error = Some(err);
                    r.cond_number = est.condition_number();
                    if let (Some(dir), Some(traj)) = (trace_dir, &est.trajectory) {
                        let path = dir.join(format!(
                            "{}_{}.csv",
                            cell.stem(),
                            method.name().to_lowercase()
                        ));
                        if let Err(e) = trace_io::write_trajectory(&path, traj) {
                            export_failure = Some(format!("trajectory export: {e}"));
                        }
                    }
                    if let Some(msg) = &export_failure {
                        r.error = None;
                        r.failure = Some(msg.clone());
                    }
                }
                Ok(_) => r.failure = Some("non-finite error".into()),
                Err(e) => r.failure = Some(e.to_string()),
            }
            r
        })
        .collect()
}

/// Directory that receives per-run traces when export is enabled.
pub fn trace_dir(cfg: &ExperimentConfig) -> PathBuf {
    cfg.output.join("traces")
}

/// Runs every cell of the grid in parallel and returns the records in grid order.
pub fn run_grid(cfg: &ExperimentConfig) -> std::io::Result<GridOutput> {
    let dir = if cfg.export_traces {
        let d = trace_dir(cfg);
        std::fs::create_dir_all(&d)?;
        Some(d)
    } else {
        None
    };
    let mut cells = Vec::new();
    for (si, satellite) in cfg.satellites.iter().enumerate() {
        for (pi, &profile) in cfg.profiles.iter().enumerate() {
            for (mi, &mode) in cfg.modes.iter().enumerate() {
                for (ki, &seed) in cfg.seeds.iter().enumerate() {
                    cells.push((
                        (si, pi, mi, ki),
                        Cell {
                            satellite,
                            profile,
                            mode,
                            seed,
                        },
                    ));
                }
            }
        }
    }
    let mut keyed: Vec<_> = cells
        .par_iter()
        .flat_map_iter(|(key, cell)| {
            run_cell(cfg, cell, dir.as_deref())
                .into_iter()
                .enumerate()
                .map(move |(ei, r)| ((key.0, key.1, key.2, ei, key.3), r))
        })
        .collect();
    keyed.sort_by_key(|(k, _)| *k);
    Ok(GridOutput {
        records: keyed.into_iter().map(|(_, r)| r).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        let mut c = ExperimentConfig::default();
        c.satellites.truncate(1);
        c.profiles = vec![ProfileKind::Chirp];
        c.modes = vec![InertiaMode::Static, InertiaMode::Periodic];
        c.seeds = vec![0, 1];
        c.horizon = 30.0;
        c
    }

    #[test]
    fn grid_order_and_size() {
        let c = small();
        let out = run_grid(&c).unwrap();
        assert_eq!(out.records.len(), c.grid_size());
        assert_eq!(out.failures(), 0);
        let keys: Vec<_> = out
            .records
            .iter()
            .map(|r| (r.inertia_mode.as_str(), r.estimator.as_str(), r.seed))
            .collect();
        assert_eq!(
            keys,
            vec![
                ("static", "LS", 0),
                ("static", "LS", 1),
                ("static", "EKF", 0),
                ("static", "EKF", 1),
                ("periodic", "LS", 0),
                ("periodic", "LS", 1),
                ("periodic", "EKF", 0),
                ("periodic", "EKF", 1),
            ]
        );
        for r in &out.records {
            assert!(r.error.unwrap() >= 0.0);
            assert_eq!(r.cond_number.is_some(), r.estimator == "LS");
            assert!(r.wall_time.is_none());
        }
    }

    #[test]
    fn broken_run_is_isolated() {
        let mut c = small();
        c.modes = vec![InertiaMode::Static];
        // two samples: too short for central differences, fine for the filter
        c.horizon = 0.2;
        let out = run_grid(&c).unwrap();
        for r in &out.records {
            assert_eq!(r.failed(), r.estimator == "LS", "{r:?}");
        }
        assert_eq!(out.failures(), 2);
    }
}
