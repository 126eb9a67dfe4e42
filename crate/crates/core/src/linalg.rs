//! Dense least-squares helpers on top of nalgebra.

use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Relative residual norm below which a column counts as linearly dependent.
pub const RANK_TOL: f64 = 1e-9;

/// Columns that are (numerically) linear combinations of the columns before
/// them, found by modified Gram-Schmidt on the original column order.
pub fn dependent_columns(x: &Matrix, tol: f64) -> Vec<usize> {
    let mut basis: Vec<Vector> = Vec::with_capacity(x.ncols());
    let mut dependent = Vec::new();
    for j in 0..x.ncols() {
        let mut v: Vector = x.column(j).into_owned();
        let norm0 = v.norm();
        if norm0 == 0.0 || !norm0.is_finite() {
            dependent.push(j);
            continue;
        }
        v /= norm0;
        // two passes keep the projection stable for nearly collinear columns
        for _ in 0..2 {
            for q in &basis {
                let c = q.dot(&v);
                v.axpy(-c, q, 1.0);
            }
        }
        let norm = v.norm();
        if norm < tol {
            dependent.push(j);
        } else {
            basis.push(v / norm);
        }
    }
    dependent
}

pub fn check_rank(x: &Matrix, names: &[String]) -> Result<()> {
    let dep = dependent_columns(x, RANK_TOL);
    if dep.is_empty() {
        Ok(())
    } else {
        Err(Error::SingularDesign {
            columns: dep
                .into_iter()
                .map(|j| names.get(j).cloned().unwrap_or_else(|| alloc::format!("x{j}")))
                .collect(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub beta: Vector,
    /// (X'X)^-1
    pub xtx_inv: Matrix,
    pub fitted: Vector,
    pub residuals: Vector,
    pub ssr: f64,
}

/// QR-based least squares. Fails with the offending column names when `x`
/// is not of full column rank.
pub fn least_squares(y: &Vector, x: &Matrix, names: &[String]) -> Result<LeastSquares> {
    let (n, k) = x.shape();
    if n < k {
        return Err(Error::TooShort { needed: k, got: n });
    }
    if y.len() != n {
        return Err(Error::InvalidParameter(alloc::format!(
            "response has {} rows, design has {n}",
            y.len()
        )));
    }
    check_rank(x, names)?;
    let qr = x.clone().qr();
    let q = qr.q();
    let r = qr.r();
    let qty = q.transpose() * y;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::SingularDesign { columns: names.to_vec() })?;
    let r_inv = r
        .solve_upper_triangular(&Matrix::identity(k, k))
        .ok_or_else(|| Error::SingularDesign { columns: names.to_vec() })?;
    let xtx_inv = &r_inv * r_inv.transpose();
    let fitted = x * &beta;
    let residuals = y - &fitted;
    let ssr = residuals.norm_squared();
    Ok(LeastSquares {
        beta,
        xtx_inv,
        fitted,
        residuals,
        ssr,
    })
}

/// Lower Cholesky factor, or `None` when the matrix is not positive definite.
pub fn cholesky_lower(m: &Matrix) -> Option<Matrix> {
    Cholesky::new(m.clone()).map(|c| c.l())
}

/// Clamp the eigenvalues of a symmetric matrix from below at
/// `floor * max(eigenvalue)`. Returns the repaired matrix and whether any
/// eigenvalue was raised; `None` when nothing can be salvaged.
pub fn floor_eigenvalues(m: &Matrix, floor: f64) -> Option<(Matrix, bool)> {
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let max = eig.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(max > 0.0) || !max.is_finite() {
        return None;
    }
    let limit = floor * max;
    let mut changed = false;
    let vals = eig.eigenvalues.map(|v| {
        if v < limit {
            changed = true;
            limit
        } else {
            v
        }
    });
    if !changed {
        return Some((m.clone(), false));
    }
    let q = &eig.eigenvectors;
    let repaired = q * Matrix::from_diagonal(&vals) * q.transpose();
    Some((repaired, true))
}

/// log-determinant from a lower Cholesky factor.
pub fn log_det_from_cholesky(l: &Matrix) -> f64 {
    2.0 * l.diagonal().iter().map(|v| libm::log(*v)).sum::<f64>()
}
