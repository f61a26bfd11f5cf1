//! Dense solves with a condition estimate.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_len, Error, Result};

/// Systems whose 2-norm condition number exceeds this are rejected as
/// singular.
pub const MAX_CONDITION: f64 = 1e12;

/// 2-norm condition number `σ_max / σ_min`; infinite for singular or empty
/// matrices.
pub fn condition_number(a: &DMatrix<f64>) -> f64 {
    if a.is_empty() {
        return f64::INFINITY;
    }
    let sv = a.clone().singular_values();
    let max = sv.max();
    let min = sv.min();
    if min > 0.0 && max.is_finite() {
        max / min
    } else {
        f64::INFINITY
    }
}

/// Solves `a · x = b` by column-pivoted QR. Fails with
/// [`Error::SingularHessian`] when the condition estimate exceeds
/// [`MAX_CONDITION`].
pub fn solve(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<(DVector<f64>, f64)> {
    check_len(a.nrows(), b.len())?;
    check_len(a.nrows(), a.ncols())?;
    let cond = condition_number(a);
    if cond.is_nan() || cond > MAX_CONDITION {
        return Err(Error::SingularHessian { cond });
    }
    let x = a.clone().col_piv_qr().solve(b).ok_or(Error::SingularHessian { cond })?;
    Ok((x, cond))
}
