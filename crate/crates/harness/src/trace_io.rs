//! Per-run trace and filter-trajectory CSV files.

use std::path::Path;

use inertia_core::{Sample, Trace, Trajectory, UnitQuaternion, Vector3};

use crate::records::{format_float, writer};

pub const TRACE_HEADER: [&str; 25] = [
    "t",
    "wx",
    "wy",
    "wz",
    "wx_meas",
    "wy_meas",
    "wz_meas",
    "rw1",
    "rw2",
    "rw3",
    "rw1_meas",
    "rw2_meas",
    "rw3_meas",
    "tau_cmd_x",
    "tau_cmd_y",
    "tau_cmd_z",
    "tau_app_x",
    "tau_app_y",
    "tau_app_z",
    "text_x",
    "text_y",
    "text_z",
    "Ix",
    "Iy",
    "Iz",
];

pub const TRAJECTORY_HEADER: [&str; 7] = [
    "t", "Ix_hat", "Iy_hat", "Iz_hat", "var_Ix", "var_Iy", "var_Iz",
];

fn invalid(msg: impl Into<String>) -> csv::Error {
    csv::Error::from(std::io::Error::new(
        std::io::ErrorKind::InvalidData,
        msg.into(),
    ))
}

pub fn write_trace(path: &Path, trace: &Trace) -> csv::Result<()> {
    let mut w = writer(std::io::BufWriter::new(std::fs::File::create(path)?));
    w.write_record(TRACE_HEADER)?;
    for s in &trace.samples {
        let mut row = Vec::with_capacity(TRACE_HEADER.len());
        row.push(format_float(s.time));
        for v in [
            &s.omega,
            &s.omega_meas,
            &s.wheel_speed,
            &s.wheel_speed_meas,
            &s.tau_cmd,
            &s.tau_applied,
            &s.tau_ext,
            &s.inertia,
        ] {
            row.extend(v.iter().map(|x| format_float(*x)));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a trace written by [`write_trace`]. Attitude is not persisted and comes back as identity.
pub fn read_trace(path: &Path, dt: f64, rw_inertia: f64) -> csv::Result<Trace> {
    let mut rdr = csv::Reader::from_path(path)?;
    if rdr.headers()?.iter().ne(TRACE_HEADER.iter().copied()) {
        return Err(invalid(format!(
            "{}: unexpected trace header",
            path.display()
        )));
    }
    let mut samples = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let v: Vec<f64> = row
            .iter()
            .map(str::parse::<f64>)
            .collect::<Result<_, _>>()
            .map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        if v.len() != TRACE_HEADER.len() {
            return Err(invalid(format!("{}: short row", path.display())));
        }
        let vec3 = |i: usize| Vector3::new(v[i], v[i + 1], v[i + 2]);
        samples.push(Sample {
            time: v[0],
            omega: vec3(1),
            omega_meas: vec3(4),
            wheel_speed: vec3(7),
            wheel_speed_meas: vec3(10),
            attitude: UnitQuaternion::identity(),
            tau_cmd: vec3(13),
            tau_applied: vec3(16),
            tau_ext: vec3(19),
            inertia: vec3(22),
        });
    }
    Ok(Trace {
        dt,
        rw_inertia,
        samples,
    })
}

pub fn write_trajectory(path: &Path, traj: &Trajectory<f64>) -> csv::Result<()> {
    let mut w = writer(std::io::BufWriter::new(std::fs::File::create(path)?));
    w.write_record(TRAJECTORY_HEADER)?;
    for ((t, i), p) in traj
        .time
        .iter()
        .zip(&traj.inertia)
        .zip(&traj.covariance_diag)
    {
        let row = [*t, i.x, i.y, i.z, p[3], p[4], p[5]].map(format_float);
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
