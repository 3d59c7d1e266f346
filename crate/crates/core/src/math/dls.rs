use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Relative pivot size below which an undamped system is declared singular.
const SINGULAR_PIVOT_RATIO: f64 = 1e-12;

/// Damped least-squares pseudoinverse `J^T (J J^T + lambda^2 I)^-1`.
///
/// With `lambda == 0` and a full-row-rank `J` this is the Moore-Penrose
/// pseudoinverse; a rank-deficient `J` then yields [`Error::SingularMatrix`].
pub fn dls_pinv(jacobian: &DMatrix<f64>, lambda: f64) -> Result<DMatrix<f64>> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::InvalidInput(format!("damping {lambda} must be >= 0")));
    }
    if jacobian.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("jacobian is not finite".into()));
    }
    let rows = jacobian.nrows();
    let mut system = jacobian * jacobian.transpose();
    for i in 0..rows {
        system[(i, i)] += lambda * lambda;
    }

    let lu = system.full_piv_lu();
    if lambda == 0.0 {
        let u = lu.u();
        let scale = u.diagonal().amax();
        let smallest = u.diagonal().amin();
        if scale == 0.0 || smallest <= SINGULAR_PIVOT_RATIO * scale {
            return Err(Error::SingularMatrix);
        }
    }
    // (J J^T + l^2 I) is symmetric, so J^T A^-1 = (A^-1 J)^T
    let solved = lu.solve(jacobian).ok_or(Error::SingularMatrix)?;
    Ok(solved.transpose())
}
