//! Spacecraft attitude simulation and principal-inertia identification.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the `f64` aliases below are
//! what the experiment harness uses.

// `!(x > 0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod ekf;
pub mod error;
pub mod estimate;
pub mod excitation;
pub mod ls;
pub mod metrics;
pub mod params;
pub mod scalar;
pub mod schedule;
pub mod sensing;
pub mod simulate;
pub mod spectrum;

pub use error::{Error, Result};
pub use estimate::{Diagnostics, EstimateResult, Method, Trajectory};
pub use excitation::{generate, ProfileKind};
pub use scalar::Scalar;
pub use schedule::InertiaMode;

pub use nalgebra::{UnitQuaternion, Vector3};

pub type Satellite = params::SatelliteParams<f64>;
pub type Schedule = schedule::InertiaSchedule<f64>;
pub type Profile = excitation::ExcitationProfile<f64>;
pub type Disturbances = dynamics::DisturbanceParams<f64>;
pub type Sensors = sensing::SensorConfig<f64>;
pub type State = dynamics::BodyState<f64>;
pub type Trace = simulate::SimTrace<f64>;
pub type Sample = simulate::TraceSample<f64>;
pub type Estimate = estimate::EstimateResult<f64>;
pub type FilterConfig = ekf::EkfConfig<f64>;
pub type Filter = ekf::Ekf<f64>;
pub type Problem = ls::LsProblem<f64>;
pub type Report = metrics::ErrorReport<f64>;
