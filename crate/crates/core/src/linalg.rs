//! Small dense linear-algebra helpers shared by the estimators.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Condition number above which covariance matrices are rejected.
pub const MAX_CONDITION: f64 = 1e12;

/// Cholesky-factored symmetric positive definite matrix.
#[derive(Debug, Clone)]
pub struct SpdFactor {
    chol: nalgebra::Cholesky<f64, nalgebra::Dyn>,
}

impl SpdFactor {
    pub fn new(m: &DMatrix<f64>, what: &str) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::Dimension(format!("{what} must be square and non-empty")));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::Singular(format!("{what} has non-finite entries")));
        }
        let sym = symmetrize(m);
        let chol = sym
            .cholesky()
            .ok_or_else(|| Error::Singular(format!("{what} is not positive definite")))?;
        // Cholesky succeeds on numerically singular matrices with round-off pivots.
        let diag = chol.l_dirty().diagonal();
        let max = diag.iter().cloned().fold(0.0_f64, f64::max);
        let min = diag.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(min > max * 1e-8) {
            return Err(Error::Singular(format!("{what} is numerically singular")));
        }
        Ok(Self { chol })
    }

    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        self.chol.solve(b)
    }

    pub fn solve_mat(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        self.chol.solve(b)
    }

    pub fn inverse(&self) -> DMatrix<f64> {
        symmetrize(&self.chol.inverse())
    }

    pub fn ln_det(&self) -> f64 {
        2.0 * self.chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>()
    }
}

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Eigenvalues of a symmetric matrix in descending order.
pub fn sym_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(symmetrize(m)).eigenvalues.iter().cloned().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// 2-norm condition number of a symmetric matrix; infinite when not positive definite.
pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    let ev = sym_eigenvalues(m);
    match (ev.first(), ev.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

/// Natural log of the determinant of a symmetric positive semidefinite matrix, `-inf` when singular.
pub fn ln_det_psd(m: &DMatrix<f64>) -> f64 {
    let ev = sym_eigenvalues(m);
    if ev.iter().any(|&v| v <= 0.0) {
        return f64::NEG_INFINITY;
    }
    ev.iter().map(|v| v.ln()).sum()
}

pub fn ones(n: usize) -> DVector<f64> {
    DVector::from_element(n, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spd_factor_solve_and_det() {
        let m = DMatrix::from_row_slice(2, 2, &[4.0, 2.0, 2.0, 3.0]);
        let f = SpdFactor::new(&m, "m").unwrap();
        assert!((f.ln_det() - 8.0_f64.ln()).abs() < 1e-14);
        let x = f.solve(&DVector::from_vec(vec![1.0, 0.0]));
        assert!((x[0] - 3.0 / 8.0).abs() < 1e-15);
        assert!((ln_det_psd(&m) - 8.0_f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn rejects_singular() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(SpdFactor::new(&m, "m").is_err());
        assert_eq!(condition_number(&m), f64::INFINITY);
        assert_eq!(ln_det_psd(&m), f64::NEG_INFINITY);
    }
}
