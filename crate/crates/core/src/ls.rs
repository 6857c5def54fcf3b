//! Batch least-squares identification of the principal moments of inertia.
//!
//! With a diagonal inertia the rigid-body residual
//! `ε = I ω̇ + ω × (I ω + h_rw) + ḣ_rw − τ_ext` is affine in `θ = (I_x, I_y, I_z)`, so every
//! sample contributes three linear rows `A θ = b`. The stacked system is solved exactly under
//! componentwise lower bounds.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::estimate::{Diagnostics, EstimateResult, Method};
use crate::scalar::Scalar;
use crate::simulate::SimTrace;

/// Default lower bound on every principal moment, kg·m².
pub const DEFAULT_LOWER_BOUND: f64 = 1e-6;
/// Regressors with a larger condition number are flagged degenerate.
pub const DEGENERATE_CONDITION: f64 = 1e12;

#[derive(Clone, Debug, PartialEq)]
pub struct LsProblem<T: Scalar> {
    /// `3·m × 3` regressor, three rows per usable sample.
    pub regressor: DMatrix<T>,
    pub target: DVector<T>,
    /// Componentwise lower bound; there is no upper bound.
    pub lower: Vector3<T>,
    pub condition_number: T,
}

/// Central-difference angular acceleration at interior samples (endpoints dropped).
pub fn finite_diff_omega_dot<T: Scalar>(omega: &[Vector3<T>], dt: T) -> Result<Vec<Vector3<T>>> {
    if omega.len() < 3 {
        return Err(Error::Input(
            "central differences need at least 3 samples".into(),
        ));
    }
    let denom = dt * T::lit(2.0);
    Ok(omega.windows(3).map(|w| (w[2] - w[0]) / denom).collect())
}

/// Three regressor rows for one sample: `rows · θ = I ω̇ + ω × (I ω)`.
pub fn regressor_rows<T: Scalar>(omega: &Vector3<T>, omega_dot: &Vector3<T>) -> Matrix3<T> {
    let (x, y, z) = (omega.x, omega.y, omega.z);
    #[rustfmt::skip]
    let rows = Matrix3::new(
        omega_dot.x, -y * z, y * z,
        z * x, omega_dot.y, -x * z,
        -x * y, x * y, omega_dot.z,
    );
    rows
}

/// Stacks the regression over every interior sample of `trace`.
///
/// The wheel momentum comes from measured wheel speeds. The wheel torque at sample k is the
/// mean applied torque over the two control periods spanned by the central difference.
pub fn build_problem<T: Scalar>(trace: &SimTrace<T>, tau_ext_known: bool) -> Result<LsProblem<T>> {
    let omega: Vec<Vector3<T>> = trace.omega_meas();
    let omega_dot = finite_diff_omega_dot(&omega, trace.dt)?;
    let m = omega_dot.len();
    let mut a = DMatrix::zeros(3 * m, 3);
    let mut b = DVector::zeros(3 * m);
    let half = T::lit(0.5);
    for (j, wd) in omega_dot.iter().enumerate() {
        let k = j + 1;
        let s = &trace.samples[k];
        let w = &s.omega_meas;
        let h_rw = s.wheel_speed_meas * trace.rw_inertia;
        let h_rw_dot = (trace.samples[k - 1].tau_applied + s.tau_applied) * half;
        let tau_ext = if tau_ext_known {
            s.tau_ext
        } else {
            Vector3::zeros()
        };
        let rhs = -w.cross(&h_rw) - h_rw_dot + tau_ext;
        a.fixed_view_mut::<3, 3>(3 * j, 0)
            .copy_from(&regressor_rows(w, wd));
        b.fixed_rows_mut::<3>(3 * j).copy_from(&rhs);
    }
    let condition_number = condition_number(&a);
    Ok(LsProblem {
        regressor: a,
        target: b,
        lower: Vector3::repeat(T::lit(DEFAULT_LOWER_BOUND)),
        condition_number,
    })
}

/// Ratio of extreme singular values; infinite for a rank-deficient matrix.
pub fn condition_number<T: Scalar>(a: &DMatrix<T>) -> T {
    let r = reduce(a, &DVector::zeros(a.nrows())).0;
    let sv = r.singular_values();
    let max = sv.max();
    let min = sv.min();
    if min > T::zero() {
        max / min
    } else {
        T::max_value().unwrap_or_else(T::one)
    }
}

/// Orthogonal reduction of the tall system to `R θ ≈ c` with `‖Aθ − b‖² = ‖Rθ − c‖² + rest`.
fn reduce<T: Scalar>(a: &DMatrix<T>, b: &DVector<T>) -> (Matrix3<T>, Vector3<T>) {
    if a.nrows() < 3 {
        // pad with zero rows so the reduction always yields a square factor
        let mut ap = DMatrix::zeros(3, 3);
        let mut bp = DVector::zeros(3);
        ap.view_mut((0, 0), (a.nrows(), 3)).copy_from(a);
        bp.rows_mut(0, a.nrows()).copy_from(b);
        return reduce(&ap, &bp);
    }
    let qr = a.clone().qr();
    let mut qtb = b.clone();
    qr.q_tr_mul(&mut qtb);
    let r = qr.r();
    (
        Matrix3::from_fn(|i, j| r[(i, j)]),
        Vector3::new(qtb[0], qtb[1], qtb[2]),
    )
}

/// Minimizes `Σ εᵀε` subject to `θ ≥ lower`.
///
/// Every face of the feasible orthant is tried: the free components are solved by
/// pseudo-inverse with the rest pinned to their bounds, and the cheapest feasible candidate
/// wins. With three unknowns that is eight small solves and yields the exact minimizer.
pub fn solve<T: Scalar>(problem: &LsProblem<T>) -> Result<EstimateResult<T>> {
    let a = &problem.regressor;
    let b = &problem.target;
    if a.ncols() != 3 || a.nrows() != b.len() || a.nrows() == 0 {
        return Err(Error::Input("malformed least-squares problem".into()));
    }
    let (r, c) = reduce(a, b);
    let lower = problem.lower;
    let eps = T::default_epsilon() * T::lit(64.0);

    let mut best: Option<(T, Vector3<T>)> = None;
    for fixed_mask in 0u8..8 {
        let free: Vec<usize> = (0..3).filter(|i| fixed_mask & (1 << i) == 0).collect();
        let mut theta = lower;
        if !free.is_empty() {
            let mut rhs = c;
            for i in (0..3).filter(|i| fixed_mask & (1 << i) != 0) {
                rhs -= r.column(i) * lower[i];
            }
            let sub = DMatrix::from_fn(3, free.len(), |i, j| r[(i, free[j])]);
            let svd = sub.svd(true, true);
            let tol = svd.singular_values.max() * eps;
            let x = svd
                .solve(&DVector::from_column_slice(rhs.as_slice()), tol)
                .map_err(|e| Error::Numeric(e.to_string()))?;
            for (j, &i) in free.iter().enumerate() {
                theta[i] = x[j];
            }
            if (0..3).any(|i| theta[i] < lower[i]) {
                continue;
            }
        }
        let cost = (r * theta - c).norm_squared();
        if best.is_none_or(|(bc, _)| cost < bc) {
            best = Some((cost, theta));
        }
    }
    let (_, theta) = best.expect("the all-fixed face is always feasible");

    let cond = problem.condition_number;
    let degenerate = !(cond <= T::lit(DEGENERATE_CONDITION));
    Ok(EstimateResult {
        inertia_hat: theta,
        method: Method::Ls,
        diagnostics: Diagnostics::Ls {
            condition_number: cond,
            degenerate,
        },
        trajectory: None,
    })
}

/// `build_problem` followed by `solve`.
pub fn estimate<T: Scalar>(trace: &SimTrace<T>, tau_ext_known: bool) -> Result<EstimateResult<T>> {
    solve(&build_problem(trace, tau_ext_known)?)
}
