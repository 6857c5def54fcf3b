//! Closed simulation loop: profile → saturation → RK4 dynamics → noisy sensors.

use nalgebra::{UnitQuaternion, Vector3};

use crate::dynamics::{external_torque, rk4_step, BodyState, DisturbanceParams};
use crate::error::{Error, Result};
use crate::excitation::ExcitationProfile;
use crate::params::SatelliteParams;
use crate::scalar::Scalar;
use crate::schedule::InertiaSchedule;
use crate::sensing::{measure, SensorConfig, SensorNoise};

/// Integration step used inside each control period, s.
pub const INTERNAL_DT: f64 = 0.01;

/// One control-period sample of a simulation run.
///
/// State quantities are taken at `time`; `tau_applied` is the mean wheel torque actually
/// delivered over `[time, time + dt)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceSample<T: Scalar> {
    pub time: T,
    pub omega: Vector3<T>,
    pub omega_meas: Vector3<T>,
    pub wheel_speed: Vector3<T>,
    pub wheel_speed_meas: Vector3<T>,
    pub attitude: UnitQuaternion<T>,
    pub tau_cmd: Vector3<T>,
    pub tau_applied: Vector3<T>,
    pub tau_ext: Vector3<T>,
    pub inertia: Vector3<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimTrace<T: Scalar> {
    /// Control period, s.
    pub dt: T,
    pub rw_inertia: T,
    pub samples: Vec<TraceSample<T>>,
}

impl<T: Scalar> SimTrace<T> {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn omega_meas(&self) -> Vec<Vector3<T>> {
        self.samples.iter().map(|s| s.omega_meas).collect()
    }

    pub fn inertia_truth(&self) -> Vec<Vector3<T>> {
        self.samples.iter().map(|s| s.inertia).collect()
    }
}

/// Runs one simulation from rest with the default internal step.
pub fn simulate<T: Scalar>(
    params: &SatelliteParams<T>,
    schedule: &InertiaSchedule<T>,
    profile: &ExcitationProfile<T>,
    dist: &DisturbanceParams<T>,
    sensor: &SensorConfig<T>,
    seed: u64,
) -> Result<SimTrace<T>> {
    simulate_with_step(
        params,
        schedule,
        profile,
        dist,
        sensor,
        seed,
        T::lit(INTERNAL_DT),
    )
}

pub fn simulate_with_step<T: Scalar>(
    params: &SatelliteParams<T>,
    schedule: &InertiaSchedule<T>,
    profile: &ExcitationProfile<T>,
    dist: &DisturbanceParams<T>,
    sensor: &SensorConfig<T>,
    seed: u64,
    internal_dt: T,
) -> Result<SimTrace<T>> {
    params.validate()?;
    let dt = profile.dt;
    let slack = T::lit(1e-9) * (T::one() + schedule.t_max);
    if (profile.duration - schedule.t_max).abs() > slack {
        return Err(Error::Input(
            "profile duration must equal the schedule horizon".into(),
        ));
    }
    if !(internal_dt > T::zero()) {
        return Err(Error::Input("internal step must be positive".into()));
    }
    let substeps = (dt / internal_dt).round().as_f64().max(1.0) as usize;
    let h = dt / T::from_usize(substeps).expect("substep count");
    let switch = schedule.switch_time();

    let mut state = BodyState::at_rest();
    let mut noise = SensorNoise::new(seed);
    let mut samples = Vec::with_capacity(profile.len());
    let rw = params.rw_inertia;
    let max_tau = params.rw_max_torque;
    let index = |k: usize| T::from_usize(k).expect("index fits scalar");

    for (k, cmd) in profile.samples.iter().enumerate() {
        let t_k = index(k) * dt;
        state.time = t_k;
        let inertia = schedule.inertia_at(t_k)?;
        let tau_ext = external_torque(&state, &inertia, dist);
        let (omega_meas, wheel_speed_meas) =
            measure(&state.omega, &state.wheel_speed, sensor, &mut noise);
        let accel_cmd = cmd / rw;
        let mut spun_up = Vector3::zeros();
        let mut sample = TraceSample {
            time: t_k,
            omega: state.omega,
            omega_meas,
            wheel_speed: state.wheel_speed,
            wheel_speed_meas,
            attitude: state.attitude,
            tau_cmd: *cmd,
            tau_applied: Vector3::zeros(),
            tau_ext,
            inertia,
        };

        for j in 0..substeps {
            let t0 = t_k + index(j) * h;
            let t1 = if j + 1 == substeps {
                index(k + 1) * dt
            } else {
                t_k + index(j + 1) * h
            };
            state.time = t0;
            let mut legs = vec![(t0, t1)];
            if let Some(ts) = switch {
                if ts > t0 && ts < t1 {
                    legs = vec![(t0, ts), (ts, t1)];
                }
            }
            for (a, b) in legs {
                state.time = a;
                let out = rk4_step(&state, &accel_cmd, schedule, params, dist, b - a)?;
                spun_up += out.applied_wheel_accel * (b - a);
                state = out.state;
                state.time = b;
            }
        }
        sample.tau_applied = (spun_up * rw / dt).map(|t| t.max(-max_tau).min(max_tau));
        samples.push(sample);
    }

    Ok(SimTrace {
        dt,
        rw_inertia: rw,
        samples,
    })
}
