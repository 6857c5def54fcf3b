//! Ground-truth inertia as a function of time.

use std::fmt;
use std::str::FromStr;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InertiaMode {
    Static,
    StepChange,
    LinearDrift,
    Periodic,
}

impl InertiaMode {
    pub const ALL: [InertiaMode; 4] = [
        InertiaMode::Static,
        InertiaMode::StepChange,
        InertiaMode::LinearDrift,
        InertiaMode::Periodic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InertiaMode::Static => "static",
            InertiaMode::StepChange => "step",
            InertiaMode::LinearDrift => "drift",
            InertiaMode::Periodic => "periodic",
        }
    }

    pub fn is_dynamic(self) -> bool {
        self != InertiaMode::Static
    }
}

impl fmt::Display for InertiaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InertiaMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "static" => Ok(InertiaMode::Static),
            "step" | "step-change" | "stepchange" => Ok(InertiaMode::StepChange),
            "drift" | "linear-drift" | "lineardrift" => Ok(InertiaMode::LinearDrift),
            "periodic" => Ok(InertiaMode::Periodic),
            other => Err(Error::Config(format!("unknown inertia mode '{other}'"))),
        }
    }
}

/// Diagonal inertia I(t) over `[0, t_max]`.
#[derive(Clone, Debug, PartialEq)]
pub struct InertiaSchedule<T: Scalar> {
    pub mode: InertiaMode,
    pub base: Vector3<T>,
    pub t_max: T,
    /// Hz, periodic mode only.
    pub frequency: T,
    pub step_factor: T,
    pub drift_factor: T,
    pub periodic_amplitude: T,
}

impl<T: Scalar> InertiaSchedule<T> {
    /// Schedule with the default scaling factors (10% step, 5% drift, 3% at 0.02 Hz).
    pub fn new(mode: InertiaMode, base: Vector3<T>, t_max: T) -> Self {
        Self {
            mode,
            base,
            t_max,
            frequency: T::lit(0.02),
            step_factor: T::lit(1.1),
            drift_factor: T::lit(0.05),
            periodic_amplitude: T::lit(0.03),
        }
    }

    pub fn constant(base: Vector3<T>, t_max: T) -> Self {
        Self::new(InertiaMode::Static, base, t_max)
    }

    /// Time of the step discontinuity, if the mode has one.
    pub fn switch_time(&self) -> Option<T> {
        (self.mode == InertiaMode::StepChange).then(|| self.t_max * T::lit(0.5))
    }

    pub fn inertia_at(&self, t: T) -> Result<Vector3<T>> {
        let t = self.check_time(t)?;
        Ok(self.eval(t, t))
    }

    /// Inertia seen by an integration stage at time `t` of a step starting at `step_start`.
    ///
    /// Steps never straddle the step-change instant, so the regime is fixed by the step start;
    /// a stage landing exactly on the switch time still sees the pre-switch inertia.
    pub fn inertia_in_step(&self, step_start: T, t: T) -> Result<Vector3<T>> {
        let t = self.check_time(t)?;
        let step_start = self.check_time(step_start)?;
        Ok(self.eval(step_start, t))
    }

    fn check_time(&self, t: T) -> Result<T> {
        // Absorbs the roundoff of accumulated step times at the horizon end.
        let slack = T::lit(1e-9) * (T::one() + self.t_max);
        if !(t >= -slack && t <= self.t_max + slack) {
            return Err(Error::Domain(format!(
                "t = {} outside [0, {}]",
                t.as_f64(),
                self.t_max.as_f64()
            )));
        }
        Ok(t.max(T::zero()).min(self.t_max))
    }

    fn eval(&self, regime_t: T, t: T) -> Vector3<T> {
        match self.mode {
            InertiaMode::Static => self.base,
            InertiaMode::StepChange => {
                if regime_t < self.t_max * T::lit(0.5) {
                    self.base
                } else {
                    self.base * self.step_factor
                }
            }
            InertiaMode::LinearDrift => self.base * (T::one() + self.drift_factor * t / self.t_max),
            InertiaMode::Periodic => {
                let phase = T::two_pi() * self.frequency * t;
                self.base * (T::one() + self.periodic_amplitude * phase.sin())
            }
        }
    }
}
