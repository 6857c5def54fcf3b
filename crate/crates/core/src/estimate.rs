use std::fmt;
use std::str::FromStr;

use nalgebra::{SVector, Vector3};

use crate::error::Error;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Ls,
    Ekf,
}

impl Method {
    pub const ALL: [Method; 2] = [Method::Ls, Method::Ekf];

    pub fn name(self) -> &'static str {
        match self {
            Method::Ls => "LS",
            Method::Ekf => "EKF",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "ls" => Ok(Method::Ls),
            "ekf" => Ok(Method::Ekf),
            other => Err(Error::Config(format!("unknown estimator '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Diagnostics<T: Scalar> {
    Ls {
        condition_number: T,
        /// Regressor numerically rank deficient; the estimate is not trustworthy.
        degenerate: bool,
    },
    Ekf {
        final_covariance_diag: SVector<T, 9>,
    },
}

/// Per-sample filter history.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<T: Scalar> {
    pub time: Vec<T>,
    pub inertia: Vec<Vector3<T>>,
    pub covariance_diag: Vec<SVector<T, 9>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimateResult<T: Scalar> {
    pub inertia_hat: Vector3<T>,
    pub method: Method,
    pub diagnostics: Diagnostics<T>,
    pub trajectory: Option<Trajectory<T>>,
}

impl<T: Scalar> EstimateResult<T> {
    pub fn condition_number(&self) -> Option<T> {
        match self.diagnostics {
            Diagnostics::Ls {
                condition_number, ..
            } => Some(condition_number),
            Diagnostics::Ekf { .. } => None,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(
            self.diagnostics,
            Diagnostics::Ls {
                degenerate: true,
                ..
            }
        )
    }
}
