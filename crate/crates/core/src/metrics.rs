//! Normalized inertia errors and seed aggregation.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Fraction of the run covered by the dynamic-mode error window.
pub const DEFAULT_WINDOW_FRACTION: f64 = 0.2;

/// `‖î − I‖₂ / ‖I‖₂`.
pub fn normalized_error<T: Scalar>(i_hat: &Vector3<T>, i_true: &Vector3<T>) -> Result<T> {
    let norm = i_true.norm();
    if !(norm > T::zero()) {
        return Err(Error::Domain("true inertia has zero magnitude".into()));
    }
    Ok((i_hat - i_true).norm() / norm)
}

/// Mean normalized error over the last `ceil(window_fraction · n)` samples.
pub fn sliding_window_error<T: Scalar>(
    i_hat: &[Vector3<T>],
    i_true: &[Vector3<T>],
    window_fraction: T,
) -> Result<T> {
    if i_hat.is_empty() {
        return Err(Error::Input("empty series".into()));
    }
    if i_hat.len() != i_true.len() {
        return Err(Error::Input(
            "estimate and truth series are not aligned".into(),
        ));
    }
    if !(window_fraction > T::zero() && window_fraction <= T::one()) {
        return Err(Error::Input("window fraction must lie in (0, 1]".into()));
    }
    let n = i_hat.len();
    let k = window_len(n, window_fraction.as_f64());
    let mut sum = T::zero();
    for (h, t) in i_hat[n - k..].iter().zip(&i_true[n - k..]) {
        sum += normalized_error(h, t)?;
    }
    Ok(sum / T::from_usize(k).expect("window length"))
}

fn window_len(n: usize, fraction: f64) -> usize {
    // trim representation error so that e.g. 0.2 · 3000 counts 600 samples, not 601
    let raw = fraction * n as f64;
    let k = (raw - 1e-9 * raw.max(1.0)).ceil() as usize;
    k.clamp(1, n)
}

/// Arithmetic mean and sample standard deviation (n − 1 denominator, 0 for a single value).
pub fn aggregate<T: Scalar>(values: &[T]) -> Result<(T, T)> {
    if values.is_empty() {
        return Err(Error::Input("nothing to aggregate".into()));
    }
    let n = T::from_usize(values.len()).expect("count");
    // shifted by the first value so identical inputs reproduce themselves exactly
    let shift = values[0];
    let mean = shift + values.iter().fold(T::zero(), |a, &v| a + (v - shift)) / n;
    if values.len() == 1 {
        return Ok((mean, T::zero()));
    }
    let ss = values
        .iter()
        .fold(T::zero(), |a, &v| a + (v - mean) * (v - mean));
    Ok((mean, (ss / (n - T::one())).sqrt()))
}

/// Per-seed errors of one grid cell together with their summary.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorReport<T: Scalar> {
    /// Fraction of the horizon averaged for dynamic modes; `None` for end-of-run errors.
    pub window_fraction: Option<T>,
    pub per_seed: Vec<T>,
    pub mean: T,
    pub std: T,
}

impl<T: Scalar> ErrorReport<T> {
    pub fn new(per_seed: Vec<T>, window_fraction: Option<T>) -> Result<Self> {
        if per_seed.iter().any(|e| !(*e >= T::zero())) {
            return Err(Error::Input("errors must be non-negative".into()));
        }
        let (mean, std) = aggregate(&per_seed)?;
        Ok(Self {
            window_fraction,
            per_seed,
            mean,
            std,
        })
    }
}
