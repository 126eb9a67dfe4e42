//! Fit results and ordinary least squares on a stacked design.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use super::design::{DesignMatrix, Form, Term};
use super::robust::white_cross_section_cov;
use crate::error::Result;
use crate::linalg::{least_squares, Matrix, Vector};
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Ols,
    /// Feasible GLS with cross-equation covariance; `iterated` when run to
    /// convergence.
    SurEgls { iterated: bool },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CovarianceKind {
    Classical,
    /// Period-clustered sandwich (robust to cross-equation correlation and
    /// heteroskedasticity).
    WhiteCrossSection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub method: Method,
    pub form: Form,
    pub names: Vec<String>,
    pub terms: Vec<Term>,
    pub coefficients: Vector,
    /// Covariance used for inference; see `covariance_kind`.
    pub covariance: Matrix,
    pub covariance_kind: CovarianceKind,
    pub classical_covariance: Matrix,
    pub fitted: Vector,
    pub residuals: Vector,
    pub equations: Vec<String>,
    pub equation: Vec<usize>,
    pub period: Vec<i32>,
    /// Residual variance of each equation (divisor T_i).
    pub sigma2: Vec<f64>,
    /// Cross-equation residual correlations over overlapping periods.
    pub correlation: Matrix,
    /// Cross-equation covariance used as GLS weight (None for OLS).
    pub weight_covariance: Option<Matrix>,
    pub loglik: f64,
    pub r2: f64,
    pub r2_adj: f64,
    pub df_resid: usize,
    pub iterations: usize,
    pub notes: Vec<String>,
}

impl FitResult {
    pub fn nobs(&self) -> usize {
        self.residuals.len()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn coef(&self, name: &str) -> Option<f64> {
        self.position(name).map(|j| self.coefficients[j])
    }

    pub fn std_errors(&self) -> Vec<f64> {
        (0..self.coefficients.len())
            .map(|j| libm::sqrt(self.covariance[(j, j)].max(0.0)))
            .collect()
    }

    /// Two-sided p-values from Student's t with the residual degrees of
    /// freedom.
    pub fn p_values(&self) -> Vec<f64> {
        let df = self.df_resid.max(1) as f64;
        self.std_errors()
            .iter()
            .zip(self.coefficients.iter())
            .map(|(se, b)| stats::t_two_sided(b / se, df))
            .collect()
    }

    /// Residuals of each equation as (period, residual) in period order.
    pub fn residuals_by_equation(&self) -> Vec<Vec<(i32, f64)>> {
        let mut out = alloc::vec![Vec::new(); self.equations.len()];
        for (row, &e) in self.equation.iter().enumerate() {
            out[e].push((self.period[row], self.residuals[row]));
        }
        for v in &mut out {
            v.sort_by_key(|(p, _)| *p);
        }
        out
    }
}

/// Per-equation variances and overlap correlations of stacked residuals.
pub(crate) fn residual_moments(
    equations: usize,
    equation: &[usize],
    period: &[i32],
    residuals: &Vector,
) -> (Vec<f64>, Matrix) {
    let mut by_eq: Vec<alloc::collections::BTreeMap<i32, f64>> =
        alloc::vec![Default::default(); equations];
    for (row, &e) in equation.iter().enumerate() {
        by_eq[e].insert(period[row], residuals[row]);
    }
    let sigma2 = by_eq
        .iter()
        .map(|m| m.values().map(|e| e * e).sum::<f64>() / m.len().max(1) as f64)
        .collect();
    let mut corr = Matrix::identity(equations, equations);
    for i in 0..equations {
        for j in i + 1..equations {
            let (mut sij, mut sii, mut sjj) = (0.0, 0.0, 0.0);
            for (p, ei) in &by_eq[i] {
                if let Some(ej) = by_eq[j].get(p) {
                    sij += ei * ej;
                    sii += ei * ei;
                    sjj += ej * ej;
                }
            }
            let r = if sii > 0.0 && sjj > 0.0 {
                sij / libm::sqrt(sii * sjj)
            } else {
                0.0
            };
            corr[(i, j)] = r;
            corr[(j, i)] = r;
        }
    }
    (sigma2, corr)
}

pub(crate) fn r_squared(y: &Vector, residuals: &Vector, k: usize) -> (f64, f64) {
    let n = y.len() as f64;
    let mean = y.mean();
    let sst: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
    let ssr = residuals.norm_squared();
    let r2 = 1.0 - ssr / sst;
    let r2_adj = 1.0 - (ssr / (n - k as f64)) / (sst / (n - 1.0));
    (r2, r2_adj)
}

/// Ordinary least squares with classical covariance.
pub fn ols_fit(design: &DesignMatrix) -> Result<FitResult> {
    let ls = least_squares(&design.y, &design.x, &design.names)?;
    let n = design.nrows();
    let k = design.ncols();
    let df_resid = n - k;
    let s2 = if df_resid > 0 { ls.ssr / df_resid as f64 } else { f64::NAN };
    let classical = &ls.xtx_inv * s2;
    let (sigma2, correlation) = residual_moments(design.equations.len(), &design.equation, &design.period, &ls.residuals);
    let nf = n as f64;
    let loglik = -0.5 * nf * (libm::log(2.0 * PI) + libm::log(ls.ssr / nf) + 1.0);
    let (r2, r2_adj) = r_squared(&design.y, &ls.residuals, k);
    let mut notes = Vec::new();
    if df_resid == 0 {
        notes.push(String::from("no residual degrees of freedom"));
    }
    Ok(FitResult {
        method: Method::Ols,
        form: design.form,
        names: design.names.clone(),
        terms: design.terms.clone(),
        coefficients: ls.beta,
        covariance: classical.clone(),
        covariance_kind: CovarianceKind::Classical,
        classical_covariance: classical,
        fitted: ls.fitted,
        residuals: ls.residuals,
        equations: design.equations.clone(),
        equation: design.equation.clone(),
        period: design.period.clone(),
        sigma2,
        correlation,
        weight_covariance: None,
        loglik,
        r2,
        r2_adj,
        df_resid,
        iterations: 1,
        notes,
    })
}

/// OLS with the period-clustered sandwich as the reported covariance.
pub fn ols_fit_robust(design: &DesignMatrix) -> Result<FitResult> {
    let mut fit = ols_fit(design)?;
    let robust = white_cross_section_cov(&fit, design)?;
    fit.covariance = robust.matrix;
    fit.covariance_kind = CovarianceKind::WhiteCrossSection;
    fit.notes.extend(robust.notes);
    Ok(fit)
}
