//! Spacecraft physical constants and reaction-wheel triad.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Physical constants of one spacecraft and its three identical reaction wheels.
#[derive(Clone, Debug, PartialEq)]
pub struct SatelliteParams<T: Scalar> {
    /// kg
    pub mass: T,
    /// Bounding box, m.
    pub dims: Vector3<T>,
    /// Principal moments (diagonal of the nominal inertia tensor), kg·m².
    pub inertia_nominal: Vector3<T>,
    /// Wheel spin-axis inertia, kg·m².
    pub rw_inertia: T,
    /// N·m
    pub rw_max_torque: T,
    /// rad/s
    pub rw_max_speed: T,
    /// m
    pub rw_diameter: T,
}

impl<T: Scalar> SatelliteParams<T> {
    pub fn cubesat() -> Self {
        Self::from_f64(
            24.0,
            [0.2, 0.2, 0.3],
            [0.26, 0.26, 0.16],
            1.0e-4,
            0.01,
            460.0,
            0.06,
        )
    }

    pub fn microsat() -> Self {
        Self::from_f64(
            95.0,
            [0.5, 0.6, 0.8],
            [6.53, 5.96, 4.53],
            2.0e-3,
            0.1,
            900.0,
            0.12,
        )
    }

    pub fn smallsat() -> Self {
        Self::from_f64(
            118.0,
            [0.7, 0.8, 1.0],
            [10.6, 14.2, 15.3],
            3.0e-3,
            0.1,
            1500.0,
            0.14,
        )
    }

    /// Looks up one of the built-in presets by (case-insensitive) name.
    pub fn preset(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "cubesat" => Some(Self::cubesat()),
            "microsat" => Some(Self::microsat()),
            "smallsat" | "small-sat" | "small_sat" => Some(Self::smallsat()),
            _ => None,
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn from_f64(
        mass: f64,
        dims: [f64; 3],
        inertia: [f64; 3],
        rw_inertia: f64,
        rw_max_torque: f64,
        rw_max_speed: f64,
        rw_diameter: f64,
    ) -> Self {
        let v = |a: [f64; 3]| Vector3::new(T::lit(a[0]), T::lit(a[1]), T::lit(a[2]));
        Self {
            mass: T::lit(mass),
            dims: v(dims),
            inertia_nominal: v(inertia),
            rw_inertia: T::lit(rw_inertia),
            rw_max_torque: T::lit(rw_max_torque),
            rw_max_speed: T::lit(rw_max_speed),
            rw_diameter: T::lit(rw_diameter),
        }
    }

    /// Checks positivity of every field and the triangle inequalities on the principal moments.
    pub fn validate(&self) -> Result<()> {
        let zero = T::zero();
        let scalars = [
            ("mass", self.mass),
            ("rw_inertia", self.rw_inertia),
            ("rw_max_torque", self.rw_max_torque),
            ("rw_max_speed", self.rw_max_speed),
            ("rw_diameter", self.rw_diameter),
        ];
        for (name, v) in scalars {
            if !(v > zero) {
                return Err(Error::Config(format!("{name} must be strictly positive")));
            }
        }
        if self.dims.iter().any(|d| !(*d > zero)) {
            return Err(Error::Config("dims must be strictly positive".into()));
        }
        let i = &self.inertia_nominal;
        if i.iter().any(|d| !(*d > zero)) {
            return Err(Error::Config(
                "inertia_nominal must be strictly positive".into(),
            ));
        }
        for k in 0..3 {
            let (a, b) = ((k + 1) % 3, (k + 2) % 3);
            if i[a] + i[b] < i[k] {
                return Err(Error::Config(format!(
                    "inertia_nominal violates triangle inequality on axis {k}"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid() {
        for p in [
            SatelliteParams::<f64>::cubesat(),
            SatelliteParams::microsat(),
            SatelliteParams::smallsat(),
        ] {
            p.validate().unwrap();
        }
    }

    #[test]
    fn triangle_violation_rejected() {
        let mut p = SatelliteParams::<f64>::cubesat();
        p.inertia_nominal = Vector3::new(1.0, 1.0, 3.0);
        assert!(matches!(p.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn preset_lookup() {
        assert_eq!(
            SatelliteParams::<f64>::preset("MicroSat"),
            Some(SatelliteParams::microsat())
        );
        assert!(SatelliteParams::<f64>::preset("bigsat").is_none());
    }
}
