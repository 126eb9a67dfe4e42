//! Period-clustered ("White cross-section") sandwich covariance.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::design::DesignMatrix;
use super::fit::FitResult;
use super::sur::Whitener;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};

#[derive(Debug, Clone, PartialEq)]
pub struct RobustCovariance {
    pub matrix: Matrix,
    pub notes: Vec<String>,
}

/// `(X'W X)^-1 (sum_t X_t' W_t u_t u_t' W_t X_t) (X'W X)^-1`, clustering on
/// periods, where W is the fit's GLS weight (identity for OLS).
pub fn white_cross_section_cov(fit: &FitResult, design: &DesignMatrix) -> Result<RobustCovariance> {
    if fit.residuals.len() != design.nrows() || fit.coefficients.len() != design.ncols() {
        return Err(Error::InvalidParameter("fit does not belong to this design".into()));
    }
    let whitener = match &fit.weight_covariance {
        Some(sigma) => Whitener::new(design, sigma)?,
        None => Whitener::identity(design),
    };
    let xs = whitener.apply(&design.x);
    let us = whitener.apply_vec(&fit.residuals);
    let k = design.ncols();
    let bread = (xs.transpose() * &xs)
        .try_inverse()
        .ok_or_else(|| Error::SingularDesign { columns: design.names.clone() })?;
    let mut meat = Matrix::zeros(k, k);
    let mut clusters = 0usize;
    for (rows, _) in whitener.blocks() {
        let mut score = Vector::zeros(k);
        for &r in rows {
            score.axpy(us[r], &xs.row(r).transpose(), 1.0);
        }
        meat.ger(1.0, &score, &score, 1.0);
        clusters += 1;
    }
    let matrix = &bread * meat * &bread;
    let matrix = (&matrix + matrix.transpose()) * 0.5;
    let mut notes = Vec::new();
    if clusters < k {
        notes.push(format!(
            "only {clusters} periods for {k} coefficients: the robust meat matrix is rank deficient"
        ));
    }
    Ok(RobustCovariance { matrix, notes })
}
