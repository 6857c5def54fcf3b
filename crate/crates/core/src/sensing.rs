//! Reaction-wheel saturation and additive Gaussian sensor noise.

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::params::SatelliteParams;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct SensorConfig<T: Scalar> {
    /// rad/s
    pub gyro_noise_std: T,
    /// rad/s
    pub wheel_speed_noise_std: T,
    pub enabled: bool,
}

impl<T: Scalar> Default for SensorConfig<T> {
    fn default() -> Self {
        Self {
            gyro_noise_std: T::lit(1e-3),
            wheel_speed_noise_std: T::lit(0.1),
            enabled: true,
        }
    }
}

impl<T: Scalar> SensorConfig<T> {
    pub fn noiseless() -> Self {
        Self {
            enabled: false,
            ..Self::default()
        }
    }
}

/// Torque actually delivered by each wheel for a commanded wheel torque.
///
/// Each component is clamped to `rw_max_torque`. A wheel already at (or past) its speed limit
/// delivers zero torque when the command would drive it further out.
pub fn saturate_command<T: Scalar>(
    tau_cmd: &Vector3<T>,
    wheel_speed: &Vector3<T>,
    params: &SatelliteParams<T>,
) -> Vector3<T> {
    let max_tau = params.rw_max_torque;
    let max_speed = params.rw_max_speed;
    Vector3::from_fn(|i, _| {
        let tau = tau_cmd[i].max(-max_tau).min(max_tau);
        let w = wheel_speed[i];
        if (w >= max_speed && tau > T::zero()) || (w <= -max_speed && tau < T::zero()) {
            T::zero()
        } else {
            tau
        }
    })
}

/// Independent counter-based noise streams for the gyro and the wheel tachometers of one run.
#[derive(Clone, Debug)]
pub struct SensorNoise {
    gyro: ChaCha8Rng,
    wheel: ChaCha8Rng,
}

impl SensorNoise {
    const GYRO_STREAM: u64 = 1;
    const WHEEL_STREAM: u64 = 2;

    pub fn new(seed: u64) -> Self {
        let mut gyro = ChaCha8Rng::seed_from_u64(seed);
        gyro.set_stream(Self::GYRO_STREAM);
        let mut wheel = ChaCha8Rng::seed_from_u64(seed);
        wheel.set_stream(Self::WHEEL_STREAM);
        Self { gyro, wheel }
    }

    fn draw<T: Scalar>(rng: &mut ChaCha8Rng, std: T) -> Vector3<T> {
        Vector3::from_fn(|_, _| {
            let z: f64 = rng.sample(StandardNormal);
            T::lit(z) * std
        })
    }
}

/// Noisy gyro and tachometer readings: truth plus zero-mean Gaussian draws.
pub fn measure<T: Scalar>(
    omega: &Vector3<T>,
    wheel_speed: &Vector3<T>,
    cfg: &SensorConfig<T>,
    noise: &mut SensorNoise,
) -> (Vector3<T>, Vector3<T>) {
    if !cfg.enabled {
        return (*omega, *wheel_speed);
    }
    let dw = SensorNoise::draw(&mut noise.gyro, cfg.gyro_noise_std);
    let dr = SensorNoise::draw(&mut noise.wheel, cfg.wheel_speed_noise_std);
    (omega + dw, wheel_speed + dr)
}
