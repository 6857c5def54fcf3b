//! Extended Kalman filter over `x = [ω; I_diag; ω_rw]` with random-walk inertia.
//!
//! The process model is one explicit Euler step of the rigid-body equation with the wheel
//! acceleration as input. Gyro and tachometer readings observe ω and ω_rw directly; the
//! inertia is only reached through the coupling in the Jacobian. Covariance updates use the
//! Joseph form.

use nalgebra::{Matrix3, SMatrix, SVector, Vector3};

use crate::error::{Error, Result};
use crate::estimate::{Diagnostics, EstimateResult, Method, Trajectory};
use crate::scalar::Scalar;
use crate::sensing::SensorConfig;
use crate::simulate::SimTrace;

pub type StateVector<T> = SVector<T, 9>;
pub type StateMatrix<T> = SMatrix<T, 9, 9>;
pub type MeasurementVector<T> = SVector<T, 6>;
pub type MeasurementMatrix<T> = SMatrix<T, 6, 9>;
pub type GainMatrix<T> = SMatrix<T, 9, 6>;

/// Initial state, covariances and model constants of a filter run.
#[derive(Clone, Debug, PartialEq)]
pub struct EkfConfig<T: Scalar> {
    pub x0: StateVector<T>,
    pub p0: StateMatrix<T>,
    pub q: StateMatrix<T>,
    pub r: SMatrix<T, 6, 6>,
    pub dt: T,
    pub rw_inertia: T,
    /// Feed the logged external torque to the process model.
    pub use_tau_ext: bool,
    /// Numerical guard on the inertia components, kg·m².
    pub inertia_floor: T,
}

impl<T: Scalar> EkfConfig<T> {
    /// Default tuning around a nominal inertia, starting `guess_factor` × nominal.
    pub fn with_defaults(
        nominal: &Vector3<T>,
        rw_inertia: T,
        sensor: &SensorConfig<T>,
        dt: T,
        guess_factor: T,
    ) -> Self {
        let mean = nominal.mean();
        let q_inertia = (T::lit(1e-4) * mean).powi(2);
        let rel = T::lit(0.2);
        let mut p0 = SVector::<T, 9>::zeros();
        let mut q = SVector::<T, 9>::zeros();
        for i in 0..3 {
            p0[i] = T::lit(1e-4);
            p0[3 + i] = (rel * nominal[i]).powi(2);
            p0[6 + i] = T::one();
            q[i] = T::lit(1e-8);
            q[3 + i] = q_inertia;
            q[6 + i] = T::lit(1e-6);
        }
        // keeps R invertible when a sensor is configured noiseless
        let floor = T::lit(1e-12);
        let rg = (sensor.gyro_noise_std * sensor.gyro_noise_std).max(floor);
        let rw = (sensor.wheel_speed_noise_std * sensor.wheel_speed_noise_std).max(floor);
        let r = SVector::<T, 6>::from_fn(|i, _| if i < 3 { rg } else { rw });

        let mut x0 = StateVector::zeros();
        x0.fixed_rows_mut::<3>(3)
            .copy_from(&(nominal * guess_factor));
        Self {
            x0,
            p0: StateMatrix::from_diagonal(&p0),
            q: StateMatrix::from_diagonal(&q),
            r: SMatrix::from_diagonal(&r),
            dt,
            rw_inertia,
            use_tau_ext: true,
            inertia_floor: T::lit(1e-6),
        }
    }
}

fn split<T: Scalar>(x: &StateVector<T>) -> (Vector3<T>, Vector3<T>, Vector3<T>) {
    (
        x.fixed_rows::<3>(0).into_owned(),
        x.fixed_rows::<3>(3).into_owned(),
        x.fixed_rows::<3>(6).into_owned(),
    )
}

fn skew<T: Scalar>(v: &Vector3<T>) -> Matrix3<T> {
    v.cross_matrix()
}

/// Continuous-time angular acceleration under the filter's model.
fn omega_rate<T: Scalar>(
    omega: &Vector3<T>,
    inertia: &Vector3<T>,
    wheel: &Vector3<T>,
    u: &Vector3<T>,
    tau_ext: &Vector3<T>,
    rw_inertia: T,
) -> Vector3<T> {
    let momentum = inertia.component_mul(omega) + wheel * rw_inertia;
    (-omega.cross(&momentum) - u * rw_inertia + tau_ext).component_div(inertia)
}

/// Euler-discretized process model `f(x, u)`.
pub fn transition<T: Scalar>(
    x: &StateVector<T>,
    u: &Vector3<T>,
    tau_ext: &Vector3<T>,
    dt: T,
    rw_inertia: T,
) -> StateVector<T> {
    let (omega, inertia, wheel) = split(x);
    let mut out = *x;
    let wd = omega_rate(&omega, &inertia, &wheel, u, tau_ext, rw_inertia);
    out.fixed_rows_mut::<3>(0).copy_from(&(omega + wd * dt));
    out.fixed_rows_mut::<3>(6).copy_from(&(wheel + u * dt));
    out
}

/// Closed-form Jacobian `∂f/∂x` of [`transition`].
pub fn transition_jacobian<T: Scalar>(
    x: &StateVector<T>,
    u: &Vector3<T>,
    tau_ext: &Vector3<T>,
    dt: T,
    rw_inertia: T,
) -> StateMatrix<T> {
    let (omega, inertia, wheel) = split(x);
    let momentum = inertia.component_mul(&omega) + wheel * rw_inertia;
    let g = omega_rate(&omega, &inertia, &wheel, u, tau_ext, rw_inertia);
    let inv_i = Matrix3::from_diagonal(&inertia.map(|v| T::one() / v));
    let w_x = skew(&omega);

    // c = ω × (Iω + h_rw);  g = I⁻¹ (−c − I_rw u + τ)
    let dc_domega = w_x * Matrix3::from_diagonal(&inertia) - skew(&momentum);
    let dc_dinertia = w_x * Matrix3::from_diagonal(&omega);
    let dc_dwheel = w_x * rw_inertia;

    let dg_domega = -(inv_i * dc_domega);
    let dg_dinertia = -(inv_i * dc_dinertia) - Matrix3::from_diagonal(&g.component_div(&inertia));
    let dg_dwheel = -(inv_i * dc_dwheel);

    let mut f = StateMatrix::identity();
    let mut block = |col: usize, m: Matrix3<T>| {
        let cur = f.fixed_view::<3, 3>(0, col).into_owned();
        f.fixed_view_mut::<3, 3>(0, col).copy_from(&(cur + m * dt));
    };
    block(0, dg_domega);
    block(3, dg_dinertia);
    block(6, dg_dwheel);
    f
}

/// Selector observing ω and ω_rw.
pub fn measurement_matrix<T: Scalar>() -> MeasurementMatrix<T> {
    let mut h = MeasurementMatrix::zeros();
    for i in 0..3 {
        h[(i, i)] = T::one();
        h[(3 + i, 6 + i)] = T::one();
    }
    h
}

/// Joseph-form covariance update `(I − KH) P (I − KH)ᵀ + K R Kᵀ`, symmetrized.
pub fn joseph_update<T: Scalar>(
    p: &StateMatrix<T>,
    k: &GainMatrix<T>,
    h: &MeasurementMatrix<T>,
    r: &SMatrix<T, 6, 6>,
) -> StateMatrix<T> {
    let a = StateMatrix::identity() - k * h;
    let out = a * p * a.transpose() + k * r * k.transpose();
    (out + out.transpose()) * T::lit(0.5)
}

/// Filter state machine.
#[derive(Clone, Debug, PartialEq)]
pub struct Ekf<T: Scalar> {
    pub x: StateVector<T>,
    pub p: StateMatrix<T>,
    pub q: StateMatrix<T>,
    pub r: SMatrix<T, 6, 6>,
    pub dt: T,
    rw_inertia: T,
    inertia_floor: T,
}

impl<T: Scalar> Ekf<T> {
    pub fn new(cfg: &EkfConfig<T>) -> Self {
        Self {
            x: cfg.x0,
            p: cfg.p0,
            q: cfg.q,
            r: cfg.r,
            dt: cfg.dt,
            rw_inertia: cfg.rw_inertia,
            inertia_floor: cfg.inertia_floor,
        }
    }

    pub fn omega(&self) -> Vector3<T> {
        self.x.fixed_rows::<3>(0).into_owned()
    }

    pub fn inertia(&self) -> Vector3<T> {
        self.x.fixed_rows::<3>(3).into_owned()
    }

    pub fn wheel_speed(&self) -> Vector3<T> {
        self.x.fixed_rows::<3>(6).into_owned()
    }

    /// Expected measurement `H x`.
    pub fn predicted_measurement(&self) -> MeasurementVector<T> {
        measurement_matrix() * self.x
    }

    /// Propagates mean and covariance one control period with wheel acceleration `u`.
    pub fn predict(&mut self, u: &Vector3<T>, tau_ext: &Vector3<T>) -> Result<()> {
        self.check_inertia()?;
        let f = transition_jacobian(&self.x, u, tau_ext, self.dt, self.rw_inertia);
        self.x = transition(&self.x, u, tau_ext, self.dt, self.rw_inertia);
        let p = f * self.p * f.transpose() + self.q;
        self.p = (p + p.transpose()) * T::lit(0.5);
        Ok(())
    }

    /// Optimal gain for the current prior.
    pub fn gain(&self) -> Result<GainMatrix<T>> {
        let h = measurement_matrix::<T>();
        let s = h * self.p * h.transpose() + self.r;
        let chol = s
            .cholesky()
            .ok_or_else(|| Error::Numeric("innovation covariance not positive definite".into()))?;
        // K = P Hᵀ S⁻¹  ⇔  S Kᵀ = H P
        Ok(chol.solve(&(h * self.p)).transpose())
    }

    /// Measurement update with `z = [ω_meas; ω_rw_meas]`.
    pub fn update(&mut self, z: &MeasurementVector<T>) -> Result<()> {
        let k = self.gain()?;
        self.update_with_gain(z, &k);
        Ok(())
    }

    /// Measurement update with a caller-supplied gain.
    pub fn update_with_gain(&mut self, z: &MeasurementVector<T>, k: &GainMatrix<T>) {
        let h = measurement_matrix::<T>();
        let innovation = z - h * self.x;
        self.x += k * innovation;
        self.p = joseph_update(&self.p, k, &h, &self.r);
        for i in 3..6 {
            self.x[i] = self.x[i].max(self.inertia_floor);
        }
    }

    fn check_inertia(&self) -> Result<()> {
        if self.inertia().iter().any(|v| !(*v > T::zero())) {
            return Err(Error::Numeric(
                "non-positive inertia in filter state".into(),
            ));
        }
        Ok(())
    }
}

/// Runs the filter over a trace, calling `observe` after every update.
pub fn run_filter_observed<T: Scalar>(
    trace: &SimTrace<T>,
    cfg: &EkfConfig<T>,
    mut observe: impl FnMut(usize, &Ekf<T>),
) -> Result<EstimateResult<T>> {
    if trace.is_empty() {
        return Err(Error::Input("empty trace".into()));
    }
    let mut ekf = Ekf::new(cfg);
    let n = trace.len();
    let mut traj = Trajectory {
        time: Vec::with_capacity(n),
        inertia: Vec::with_capacity(n),
        covariance_diag: Vec::with_capacity(n),
    };
    for (k, s) in trace.samples.iter().enumerate() {
        if k > 0 {
            let prev = &trace.samples[k - 1];
            let u = prev.tau_applied / cfg.rw_inertia;
            let tau = if cfg.use_tau_ext {
                prev.tau_ext
            } else {
                Vector3::zeros()
            };
            ekf.predict(&u, &tau)?;
        }
        let mut z = MeasurementVector::zeros();
        z.fixed_rows_mut::<3>(0).copy_from(&s.omega_meas);
        z.fixed_rows_mut::<3>(3).copy_from(&s.wheel_speed_meas);
        ekf.update(&z)?;
        observe(k, &ekf);
        traj.time.push(s.time);
        traj.inertia.push(ekf.inertia());
        traj.covariance_diag.push(ekf.p.diagonal());
    }
    Ok(EstimateResult {
        inertia_hat: ekf.inertia(),
        method: Method::Ekf,
        diagnostics: Diagnostics::Ekf {
            final_covariance_diag: ekf.p.diagonal(),
        },
        trajectory: Some(traj),
    })
}

pub fn run_filter<T: Scalar>(trace: &SimTrace<T>, cfg: &EkfConfig<T>) -> Result<EstimateResult<T>> {
    run_filter_observed(trace, cfg, |_, _| {})
}
