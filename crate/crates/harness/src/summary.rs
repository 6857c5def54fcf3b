//! Per-cell aggregation of run records and the horizon sweep.

use std::io::Write;

use inertia_core::metrics::aggregate;
use inertia_core::InertiaMode;

use crate::config::ExperimentConfig;
use crate::grid::{run_grid, RunRecord};
use crate::records::{format_float, writer};

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub satellite: String,
    pub profile: String,
    pub inertia_mode: String,
    pub estimator: String,
    /// Successful runs aggregated.
    pub n: usize,
    /// `None` when every run of the cell failed.
    pub mean_pct: Option<f64>,
    pub std_pct: Option<f64>,
    /// Lowest mean among the estimators of this (satellite, profile, mode); ties all flagged.
    pub best: bool,
}

pub const SUMMARY_HEADER: [&str; 8] = [
    "satellite",
    "profile",
    "inertia_mode",
    "estimator",
    "n",
    "mean_pct",
    "std_pct",
    "best",
];

fn mean_std_pct(errors: &[f64]) -> (Option<f64>, Option<f64>) {
    let pct: Vec<f64> = errors.iter().map(|e| e * 100.0).collect();
    match aggregate(&pct) {
        Ok((m, s)) => (Some(m), Some(s)),
        Err(_) => (None, None),
    }
}

/// Groups records by (satellite, profile, mode, estimator) in order of first appearance.
pub fn summarize(records: &[RunRecord]) -> Vec<SummaryRow> {
    let mut rows: Vec<(SummaryRow, Vec<f64>)> = Vec::new();
    for r in records {
        let key = (&r.satellite, &r.profile, &r.inertia_mode, &r.estimator);
        let pos = rows
            .iter()
            .position(|(s, _)| (&s.satellite, &s.profile, &s.inertia_mode, &s.estimator) == key);
        let idx = pos.unwrap_or_else(|| {
            rows.push((
                SummaryRow {
                    satellite: r.satellite.clone(),
                    profile: r.profile.clone(),
                    inertia_mode: r.inertia_mode.clone(),
                    estimator: r.estimator.clone(),
                    n: 0,
                    mean_pct: None,
                    std_pct: None,
                    best: false,
                },
                Vec::new(),
            ));
            rows.len() - 1
        });
        if let Some(e) = r.error {
            rows[idx].1.push(e);
        }
    }
    let mut out: Vec<SummaryRow> = rows
        .into_iter()
        .map(|(mut row, errors)| {
            row.n = errors.len();
            (row.mean_pct, row.std_pct) = mean_std_pct(&errors);
            row
        })
        .collect();

    let same_cell = |a: &SummaryRow, b: &SummaryRow| {
        a.satellite == b.satellite && a.profile == b.profile && a.inertia_mode == b.inertia_mode
    };
    for i in 0..out.len() {
        let Some(mine) = out[i].mean_pct else {
            continue;
        };
        let lowest = out
            .iter()
            .filter(|o| same_cell(o, &out[i]))
            .filter_map(|o| o.mean_pct)
            .fold(f64::INFINITY, f64::min);
        out[i].best = mine <= lowest;
    }
    out
}

pub fn write_summary<W: Write>(rows: &[SummaryRow], out: W) -> csv::Result<()> {
    let mut w = writer(out);
    w.write_record(SUMMARY_HEADER)?;
    let opt = |v: Option<f64>| v.map(format_float).unwrap_or_default();
    for r in rows {
        w.write_record([
            r.satellite.clone(),
            r.profile.clone(),
            r.inertia_mode.clone(),
            r.estimator.clone(),
            r.n.to_string(),
            opt(r.mean_pct),
            opt(r.std_pct),
            u8::from(r.best).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    /// s
    pub duration: f64,
    pub estimator: String,
    pub n: usize,
    pub mean_pct: Option<f64>,
    pub std_pct: Option<f64>,
}

pub const SWEEP_HEADER: [&str; 5] = ["duration_s", "estimator", "n", "mean_pct", "std_pct"];

/// Reruns the static grid at each horizon and pools every satellite, profile and seed per estimator.
pub fn horizon_sweep(cfg: &ExperimentConfig, durations: &[f64]) -> Result<Vec<SweepRow>, String> {
    if durations.is_empty() {
        return Err("no durations given".into());
    }
    if durations.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
        return Err("durations must be positive".into());
    }
    if durations.windows(2).any(|w| w[1] <= w[0]) {
        return Err("durations must be strictly ascending".into());
    }
    let mut rows = Vec::new();
    for &duration in durations {
        let mut c = cfg.clone();
        c.horizon = duration;
        c.modes = vec![InertiaMode::Static];
        c.export_traces = false;
        c.validate().map_err(|e| e.to_string())?;
        let out = run_grid(&c).map_err(|e| e.to_string())?;
        for method in &c.estimators {
            let errors: Vec<f64> = out
                .records
                .iter()
                .filter(|r| r.estimator == method.name())
                .filter_map(|r| r.error)
                .collect();
            let (mean_pct, std_pct) = mean_std_pct(&errors);
            rows.push(SweepRow {
                duration,
                estimator: method.name().into(),
                n: errors.len(),
                mean_pct,
                std_pct,
            });
        }
    }
    Ok(rows)
}

pub fn write_sweep<W: Write>(rows: &[SweepRow], out: W) -> csv::Result<()> {
    let mut w = writer(out);
    w.write_record(SWEEP_HEADER)?;
    let opt = |v: Option<f64>| v.map(format_float).unwrap_or_default();
    for r in rows {
        w.write_record([
            format_float(r.duration),
            r.estimator.clone(),
            r.n.to_string(),
            opt(r.mean_pct),
            opt(r.std_pct),
        ])?;
    }
    w.flush()?;
    Ok(())
}
