//! Rigid-body attitude dynamics with a reaction-wheel triad.
//!
//! The body obeys `I ω̇ = −ω × (I ω + h_rw) − ḣ_rw + τ_ext` with `h_rw = I_rw ω_rw`, where the
//! inertia `I` may vary with time and is evaluated quasi-statically at each integration stage.
//! The attitude quaternion maps body to inertial coordinates and evolves as `q̇ = ½ q ⊗ (0, ω)`.

use nalgebra::{Quaternion, UnitQuaternion, Vector3};

use crate::error::{Error, Result};
use crate::params::SatelliteParams;
use crate::scalar::Scalar;
use crate::schedule::InertiaSchedule;
use crate::sensing::saturate_command;

#[derive(Clone, Debug, PartialEq)]
pub struct BodyState<T: Scalar> {
    /// Body angular rate, rad/s.
    pub omega: Vector3<T>,
    /// Body-to-inertial rotation.
    pub attitude: UnitQuaternion<T>,
    /// Wheel spin rates about the body axes, rad/s.
    pub wheel_speed: Vector3<T>,
    /// s
    pub time: T,
}

impl<T: Scalar> BodyState<T> {
    /// Spacecraft at rest, wheels stopped, identity attitude.
    pub fn at_rest() -> Self {
        Self {
            omega: Vector3::zeros(),
            attitude: UnitQuaternion::identity(),
            wheel_speed: Vector3::zeros(),
            time: T::zero(),
        }
    }

    pub fn wheel_momentum(&self, rw_inertia: T) -> Vector3<T> {
        self.wheel_speed * rw_inertia
    }

    /// Total angular momentum `I ω + h_rw` in body coordinates.
    pub fn angular_momentum(&self, inertia: &Vector3<T>, rw_inertia: T) -> Vector3<T> {
        inertia.component_mul(&self.omega) + self.wheel_momentum(rw_inertia)
    }
}

/// Simplified gravity-gradient and solar-radiation-pressure model.
#[derive(Clone, Debug, PartialEq)]
pub struct DisturbanceParams<T: Scalar> {
    /// rad/s
    pub orbital_rate: T,
    /// N
    pub srp_force: T,
    /// Centre-of-pressure offset, m.
    pub cop_offset: T,
    pub enabled: bool,
}

impl<T: Scalar> Default for DisturbanceParams<T> {
    fn default() -> Self {
        Self {
            orbital_rate: T::lit(1e-3),
            srp_force: T::lit(1e-6),
            cop_offset: T::lit(0.01),
            enabled: true,
        }
    }
}

impl<T: Scalar> DisturbanceParams<T> {
    pub fn disabled() -> Self {
        Self {
            enabled: false,
            ..Self::default()
        }
    }
}

/// Time derivative of a [`BodyState`].
#[derive(Clone, Debug, PartialEq)]
pub struct StateDerivative<T: Scalar> {
    pub omega_dot: Vector3<T>,
    pub attitude_dot: Quaternion<T>,
    pub wheel_accel: Vector3<T>,
}

/// Inertial nadir direction expressed in the body frame.
///
/// Nadir sweeps the inertial x–z plane at the orbital rate.
pub fn nadir_body<T: Scalar>(attitude: &UnitQuaternion<T>, orbital_rate: T, t: T) -> Vector3<T> {
    let angle = orbital_rate * t;
    let nadir_inertial = Vector3::new(angle.cos(), T::zero(), angle.sin());
    attitude.inverse_transform_vector(&nadir_inertial)
}

/// Gravity-gradient plus SRP torque in body coordinates, N·m.
pub fn external_torque<T: Scalar>(
    state: &BodyState<T>,
    inertia: &Vector3<T>,
    dist: &DisturbanceParams<T>,
) -> Vector3<T> {
    if !dist.enabled {
        return Vector3::zeros();
    }
    let n = dist.orbital_rate;
    let u = nadir_body(&state.attitude, n, state.time);
    let gg = u.cross(&inertia.component_mul(&u)) * (T::lit(3.0) * n * n);
    gg + srp_torque(dist)
}

fn srp_torque<T: Scalar>(dist: &DisturbanceParams<T>) -> Vector3<T> {
    let axis = Vector3::new(T::one(), T::one(), T::one()) / T::lit(3.0).sqrt();
    axis * (dist.srp_force * dist.cop_offset)
}

/// State derivative for an already-saturated wheel acceleration, with the inertia evaluated at
/// `state.time`.
pub fn dynamics_derivative<T: Scalar>(
    state: &BodyState<T>,
    wheel_accel: &Vector3<T>,
    schedule: &InertiaSchedule<T>,
    params: &SatelliteParams<T>,
    dist: &DisturbanceParams<T>,
) -> Result<StateDerivative<T>> {
    let inertia = schedule.inertia_at(state.time)?;
    derivative_with_inertia(state, wheel_accel, &inertia, params, dist)
}

pub(crate) fn derivative_with_inertia<T: Scalar>(
    state: &BodyState<T>,
    wheel_accel: &Vector3<T>,
    inertia: &Vector3<T>,
    params: &SatelliteParams<T>,
    dist: &DisturbanceParams<T>,
) -> Result<StateDerivative<T>> {
    if inertia.iter().any(|i| !(*i > T::zero())) {
        return Err(Error::Numeric(format!(
            "non-positive inertia at t = {}",
            state.time.as_f64()
        )));
    }
    let h_rw = state.wheel_momentum(params.rw_inertia);
    let h_rw_dot = wheel_accel * params.rw_inertia;
    let tau_ext = external_torque(state, inertia, dist);
    let momentum = inertia.component_mul(&state.omega) + h_rw;
    let net = -state.omega.cross(&momentum) - h_rw_dot + tau_ext;
    let omega_dot = net.component_div(inertia);
    let attitude_dot =
        state.attitude.quaternion() * Quaternion::from_imag(state.omega) * T::lit(0.5);
    Ok(StateDerivative {
        omega_dot,
        attitude_dot,
        wheel_accel: *wheel_accel,
    })
}

/// Wheel acceleration actually applied over a step of length `dt`.
///
/// Applies [`saturate_command`] to the commanded wheel torque, then trims the acceleration so
/// the wheel lands exactly on its speed limit instead of overshooting it within the step.
pub fn applied_wheel_accel<T: Scalar>(
    wheel_accel_cmd: &Vector3<T>,
    wheel_speed: &Vector3<T>,
    params: &SatelliteParams<T>,
    dt: T,
) -> Vector3<T> {
    let tau = saturate_command(&(wheel_accel_cmd * params.rw_inertia), wheel_speed, params);
    let max = params.rw_max_speed;
    Vector3::from_fn(|i, _| {
        let a = tau[i] / params.rw_inertia;
        let w = wheel_speed[i];
        if w + a * dt > max {
            ((max - w) / dt).max(T::zero())
        } else if w + a * dt < -max {
            ((-max - w) / dt).min(T::zero())
        } else {
            a
        }
    })
}

/// Result of one integration step.
#[derive(Clone, Debug, PartialEq)]
pub struct StepOutput<T: Scalar> {
    pub state: BodyState<T>,
    /// Wheel acceleration held over the step after saturation, rad/s².
    pub applied_wheel_accel: Vector3<T>,
}

/// One classic fourth-order Runge–Kutta step with the wheel command held constant.
pub fn rk4_step<T: Scalar>(
    state: &BodyState<T>,
    wheel_accel_cmd: &Vector3<T>,
    schedule: &InertiaSchedule<T>,
    params: &SatelliteParams<T>,
    dist: &DisturbanceParams<T>,
    dt: T,
) -> Result<StepOutput<T>> {
    if !(dt > T::zero()) {
        return Err(Error::Input("integration step must be positive".into()));
    }
    let accel = applied_wheel_accel(wheel_accel_cmd, &state.wheel_speed, params, dt);
    let t0 = state.time;
    let half = dt * T::lit(0.5);

    let eval = |s: &BodyState<T>| -> Result<StateDerivative<T>> {
        let inertia = schedule.inertia_in_step(t0, s.time)?;
        derivative_with_inertia(s, &accel, &inertia, params, dist)
    };
    let advance = |d: &StateDerivative<T>, h: T| -> BodyState<T> {
        let q = state.attitude.quaternion() + d.attitude_dot * h;
        BodyState {
            omega: state.omega + d.omega_dot * h,
            attitude: UnitQuaternion::new_normalize(q),
            wheel_speed: state.wheel_speed + d.wheel_accel * h,
            time: t0 + h,
        }
    };

    let k1 = eval(state)?;
    let k2 = eval(&advance(&k1, half))?;
    let k3 = eval(&advance(&k2, half))?;
    let k4 = eval(&advance(&k3, dt))?;

    let two = T::lit(2.0);
    let sixth = dt / T::lit(6.0);
    let omega = state.omega
        + (k1.omega_dot + k2.omega_dot * two + k3.omega_dot * two + k4.omega_dot) * sixth;
    let q = state.attitude.quaternion()
        + (k1.attitude_dot + k2.attitude_dot * two + k3.attitude_dot * two + k4.attitude_dot)
            * sixth;
    let max = params.rw_max_speed;
    let wheel_speed = (state.wheel_speed + accel * dt).map(|w| w.max(-max).min(max));

    Ok(StepOutput {
        state: BodyState {
            omega,
            attitude: UnitQuaternion::new_normalize(q),
            wheel_speed,
            time: t0 + dt,
        },
        applied_wheel_accel: accel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params_with_inertia(i: [f64; 3]) -> SatelliteParams<f64> {
        let mut p = SatelliteParams::cubesat();
        p.inertia_nominal = Vector3::from(i);
        p
    }

    fn omega_dot_oracle(i: [f64; 3], w: [f64; 3]) -> [f64; 3] {
        // −ω × (Iω) expanded by components
        let [ix, iy, iz] = i;
        let [wx, wy, wz] = w;
        [
            -(wy * iz * wz - wz * iy * wy) / ix,
            -(wz * ix * wx - wx * iz * wz) / iy,
            -(wx * iy * wy - wy * ix * wx) / iz,
        ]
    }

    #[test]
    fn equilibrium_has_zero_derivative() {
        let p = SatelliteParams::<f64>::cubesat();
        let sched = InertiaSchedule::constant(p.inertia_nominal, 300.0);
        let d = dynamics_derivative(
            &BodyState::at_rest(),
            &Vector3::zeros(),
            &sched,
            &p,
            &DisturbanceParams::disabled(),
        )
        .unwrap();
        assert_eq!(d.omega_dot, Vector3::zeros());
        assert_eq!(d.attitude_dot, Quaternion::new(0.0, 0.0, 0.0, 0.0));
        assert_eq!(d.wheel_accel, Vector3::zeros());
    }

    #[test]
    fn euler_equation_sign_convention() {
        let i = [1.0, 1.0, 2.0];
        let w = [0.1, 0.0, 1.0];
        let p = params_with_inertia(i);
        let sched = InertiaSchedule::constant(Vector3::from(i), 10.0);
        let s = BodyState {
            omega: Vector3::from(w),
            ..BodyState::at_rest()
        };
        let d = dynamics_derivative(
            &s,
            &Vector3::zeros(),
            &sched,
            &p,
            &DisturbanceParams::disabled(),
        )
        .unwrap();
        let expected = omega_dot_oracle(i, w);
        assert_relative_eq!(d.omega_dot, Vector3::from(expected), epsilon = 1e-15);
        assert_relative_eq!(d.omega_dot, Vector3::new(0.0, 0.1, 0.0), epsilon = 1e-15);
    }

    #[test]
    fn wheel_torque_reacts_on_body() {
        let p = SatelliteParams::<f64>::cubesat();
        let sched = InertiaSchedule::constant(p.inertia_nominal, 300.0);
        let accel = Vector3::new(0.01 / p.rw_inertia, 0.0, 0.0);
        let d = dynamics_derivative(
            &BodyState::at_rest(),
            &accel,
            &sched,
            &p,
            &DisturbanceParams::disabled(),
        )
        .unwrap();
        assert_relative_eq!(
            d.omega_dot,
            Vector3::new(-0.01 / 0.26, 0.0, 0.0),
            epsilon = 1e-15
        );
        assert_relative_eq!(d.omega_dot.x, -0.03846, epsilon = 1e-5);
    }

    #[test]
    fn disabled_disturbance_is_zero() {
        let s = BodyState {
            omega: Vector3::new(0.3, 0.1, -0.2),
            ..BodyState::at_rest()
        };
        let t = external_torque(
            &s,
            &Vector3::new(1.0, 2.0, 3.0),
            &DisturbanceParams::disabled(),
        );
        assert_eq!(t, Vector3::zeros());
    }

    #[test]
    fn isotropic_body_feels_only_srp() {
        let dist = DisturbanceParams::<f64>::default();
        let s = BodyState {
            time: 123.0,
            ..BodyState::at_rest()
        };
        let t = external_torque(&s, &Vector3::new(1.0, 1.0, 1.0), &dist);
        let srp = 1e-6 * 0.01 / 3f64.sqrt();
        assert_relative_eq!(t, Vector3::new(srp, srp, srp), epsilon = 1e-20);
    }

    #[test]
    fn gravity_gradient_hand_evaluated() {
        // Attitude chosen so that nadir (inertial +x at t = 0) appears as (0, sin45°, cos45°).
        let target = Vector3::new(
            0.0,
            std::f64::consts::FRAC_1_SQRT_2,
            std::f64::consts::FRAC_1_SQRT_2,
        );
        let attitude = UnitQuaternion::rotation_between(&target, &Vector3::x()).unwrap();
        let s = BodyState {
            attitude,
            ..BodyState::at_rest()
        };
        let dist = DisturbanceParams::<f64> {
            srp_force: 0.0,
            ..Default::default()
        };
        let u = nadir_body(&s.attitude, dist.orbital_rate, 0.0);
        assert_relative_eq!(u, target, epsilon = 1e-12);
        let t = external_torque(&s, &Vector3::new(10.6, 14.2, 15.3), &dist);
        assert_relative_eq!(t.x, 3.0 * 1e-6 * 0.5 * (15.3 - 14.2), epsilon = 1e-15);
        assert_relative_eq!(t.x, 1.65e-6, epsilon = 1e-12);
        assert_relative_eq!(t.y, 0.0, epsilon = 1e-18);
        assert_relative_eq!(t.z, 0.0, epsilon = 1e-18);
    }

    #[test]
    fn rk4_keeps_equilibrium() {
        let p = SatelliteParams::<f64>::cubesat();
        let sched = InertiaSchedule::constant(p.inertia_nominal, 300.0);
        let out = rk4_step(
            &BodyState::at_rest(),
            &Vector3::zeros(),
            &sched,
            &p,
            &DisturbanceParams::disabled(),
            0.01,
        )
        .unwrap();
        let expected = BodyState {
            time: 0.01,
            ..BodyState::at_rest()
        };
        assert_eq!(out.state, expected);
    }

    #[test]
    fn rk4_rejects_non_positive_step() {
        let p = SatelliteParams::<f64>::cubesat();
        let sched = InertiaSchedule::constant(p.inertia_nominal, 300.0);
        let r = rk4_step(
            &BodyState::at_rest(),
            &Vector3::zeros(),
            &sched,
            &p,
            &DisturbanceParams::disabled(),
            0.0,
        );
        assert!(matches!(r, Err(Error::Input(_))));
    }

    #[test]
    fn wheel_lands_on_speed_limit() {
        let p = SatelliteParams::<f64>::cubesat();
        let w = Vector3::new(459.95, -459.95, 0.0);
        let cmd = Vector3::new(100.0, -100.0, 100.0);
        let a = applied_wheel_accel(&cmd, &w, &p, 0.01);
        assert_relative_eq!(
            w + a * 0.01,
            Vector3::new(460.0, -460.0, 1.0),
            epsilon = 1e-9
        );
    }

    #[test]
    fn non_positive_inertia_is_fatal() {
        let p = SatelliteParams::<f64>::cubesat();
        let sched = InertiaSchedule::constant(Vector3::new(0.2, 0.0, 0.1), 10.0);
        let r = dynamics_derivative(
            &BodyState::at_rest(),
            &Vector3::zeros(),
            &sched,
            &p,
            &DisturbanceParams::disabled(),
        );
        assert!(matches!(r, Err(Error::Numeric(_))));
    }
}
