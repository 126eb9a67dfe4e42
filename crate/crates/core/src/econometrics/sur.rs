//! Seemingly-unrelated-regressions estimation by feasible GLS.
//!
//! Errors are allowed to be contemporaneously correlated across equations
//! and independent across periods. With an unbalanced panel the
//! cross-equation covariance is estimated pairwise over overlapping
//! periods and every period is weighted by the sub-block of the countries
//! it contains.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use super::design::DesignMatrix;
use super::fit::{r_squared, residual_moments, CovarianceKind, FitResult, Method};
use super::robust::white_cross_section_cov;
use crate::error::{Error, Result};
use crate::linalg::{cholesky_lower, floor_eigenvalues, least_squares, log_det_from_cholesky, Matrix, Vector};

/// Relative eigenvalue floor for repairing an indefinite covariance.
pub const EIGEN_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SurOptions {
    /// Iterate to convergence (maximum likelihood under normal errors)
    /// instead of stopping after the first GLS step.
    pub iterate: bool,
    pub tol: f64,
    pub max_iter: usize,
    /// Use this cross-equation covariance instead of estimating it.
    pub fixed_covariance: Option<Matrix>,
    /// Report the period-clustered sandwich instead of the GLS covariance.
    pub robust: bool,
}

impl Default for SurOptions {
    fn default() -> Self {
        SurOptions {
            iterate: false,
            tol: 1e-8,
            max_iter: 100,
            fixed_covariance: None,
            robust: true,
        }
    }
}

/// Per-period Cholesky factors of the cross-equation covariance.
#[derive(Debug, Clone)]
pub(crate) struct Whitener {
    blocks: Vec<(Vec<usize>, Option<Matrix>)>,
}

impl Whitener {
    /// Blocks without weighting (plain OLS geometry).
    pub(crate) fn identity(design: &DesignMatrix) -> Self {
        Whitener {
            blocks: design.rows_by_period().into_values().map(|rows| (rows, None)).collect(),
        }
    }

    pub(crate) fn new(design: &DesignMatrix, sigma: &Matrix) -> Result<Self> {
        let mut cache: BTreeMap<Vec<usize>, Matrix> = BTreeMap::new();
        let mut blocks = Vec::new();
        for (period, rows) in design.rows_by_period() {
            let eqs: Vec<usize> = rows.iter().map(|&r| design.equation[r]).collect();
            if eqs.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidParameter(format!(
                    "period {period} has two rows for the same equation"
                )));
            }
            let l = match cache.get(&eqs) {
                Some(l) => l.clone(),
                None => {
                    let sub = Matrix::from_fn(eqs.len(), eqs.len(), |a, b| sigma[(eqs[a], eqs[b])]);
                    let l = cholesky_lower(&sub).ok_or(Error::CovarianceNotPd)?;
                    cache.insert(eqs, l.clone());
                    l
                }
            };
            blocks.push((rows, Some(l)));
        }
        Ok(Whitener { blocks })
    }

    pub(crate) fn blocks(&self) -> impl Iterator<Item = &(Vec<usize>, Option<Matrix>)> {
        self.blocks.iter()
    }

    /// L^-1 applied block-wise to the rows of `m`.
    pub(crate) fn apply(&self, m: &Matrix) -> Matrix {
        let mut out = m.clone();
        for (rows, l) in &self.blocks {
            if let Some(l) = l {
                let sub = Matrix::from_fn(rows.len(), m.ncols(), |a, c| m[(rows[a], c)]);
                let solved = l.solve_lower_triangular(&sub).expect("Cholesky factor is invertible");
                for (a, &r) in rows.iter().enumerate() {
                    for c in 0..m.ncols() {
                        out[(r, c)] = solved[(a, c)];
                    }
                }
            }
        }
        out
    }

    pub(crate) fn apply_vec(&self, v: &Vector) -> Vector {
        let m = Matrix::from_column_slice(v.len(), 1, v.as_slice());
        self.apply(&m).column(0).into_owned()
    }

    /// Gaussian log-likelihood of `residuals` under this weighting.
    fn loglik(&self, residuals: &Vector) -> f64 {
        let mut ll = 0.0;
        for (rows, l) in &self.blocks {
            let l = l.as_ref().expect("weighted blocks");
            let u = Vector::from_iterator(rows.len(), rows.iter().map(|&r| residuals[r]));
            let z = l.solve_lower_triangular(&u).expect("Cholesky factor is invertible");
            ll -= 0.5 * (rows.len() as f64 * libm::log(2.0 * PI) + log_det_from_cholesky(l) + z.norm_squared());
        }
        ll
    }
}

/// Cross-equation residual covariance, each entry averaged over the
/// periods the two equations share. Pairs without overlap get 0.
pub fn cross_covariance(design: &DesignMatrix, residuals: &Vector) -> (Matrix, Vec<String>) {
    let m = design.equations.len();
    let mut by_eq: Vec<BTreeMap<i32, f64>> = alloc::vec![BTreeMap::new(); m];
    for (row, &e) in design.equation.iter().enumerate() {
        by_eq[e].insert(design.period[row], residuals[row]);
    }
    let mut notes = Vec::new();
    let mut sigma = Matrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let mut sum = 0.0;
            let mut count = 0usize;
            for (p, ei) in &by_eq[i] {
                if let Some(ej) = by_eq[j].get(p) {
                    sum += ei * ej;
                    count += 1;
                }
            }
            let v = if count > 0 {
                sum / count as f64
            } else {
                notes.push(format!(
                    "{} and {} share no periods; covariance set to 0",
                    design.equations[i], design.equations[j]
                ));
                0.0
            };
            sigma[(i, j)] = v;
            sigma[(j, i)] = v;
        }
    }
    (sigma, notes)
}

fn usable_covariance(sigma: Matrix, notes: &mut Vec<String>) -> Result<Matrix> {
    if cholesky_lower(&sigma).is_some() {
        return Ok(sigma);
    }
    let (repaired, _) = floor_eigenvalues(&sigma, EIGEN_FLOOR).ok_or(Error::CovarianceNotPd)?;
    if cholesky_lower(&repaired).is_none() {
        return Err(Error::CovarianceNotPd);
    }
    notes.push(format!(
        "cross-equation covariance was not positive definite; eigenvalues floored at {EIGEN_FLOOR:e} x max"
    ));
    Ok(repaired)
}

struct GlsStep {
    beta: Vector,
    xtx_inv: Matrix,
}

fn gls_step(design: &DesignMatrix, whitener: &Whitener) -> Result<GlsStep> {
    let xs = whitener.apply(&design.x);
    let ys = whitener.apply_vec(&design.y);
    let ls = least_squares(&ys, &xs, &design.names)?;
    Ok(GlsStep {
        beta: ls.beta,
        xtx_inv: ls.xtx_inv,
    })
}

/// Feasible GLS for a stacked system with contemporaneously correlated
/// errors: OLS first stage, pairwise covariance, GLS with per-period
/// blocks, optionally iterated until the largest coefficient change is
/// below `tol`.
pub fn sur_egls_fit(design: &DesignMatrix, options: &SurOptions) -> Result<FitResult> {
    if design.equations.len() < 2 && options.fixed_covariance.is_none() {
        return Err(Error::InvalidParameter("SUR needs at least two equations".into()));
    }
    let mut notes = Vec::new();
    let first = least_squares(&design.y, &design.x, &design.names)?;
    let mut beta = first.beta;
    let mut residuals = first.residuals;
    let mut iterations = 0;
    let mut converged = false;
    let (mut sigma, mut whitener, mut step);
    loop {
        sigma = match &options.fixed_covariance {
            Some(s) => s.clone(),
            None => {
                let (s, n) = cross_covariance(design, &residuals);
                if iterations == 0 {
                    notes.extend(n);
                }
                usable_covariance(s, &mut notes)?
            }
        };
        whitener = Whitener::new(design, &sigma)?;
        step = gls_step(design, &whitener)?;
        iterations += 1;
        let change = (&step.beta - &beta).amax();
        beta = step.beta.clone();
        residuals = &design.y - &design.x * &beta;
        if !options.iterate || options.fixed_covariance.is_some() {
            break;
        }
        if change < options.tol {
            converged = true;
            break;
        }
        if iterations >= options.max_iter {
            break;
        }
    }
    if options.iterate && options.fixed_covariance.is_none() && !converged {
        notes.push(format!(
            "iterated SUR stopped after {iterations} iterations without reaching tol {:e}",
            options.tol
        ));
    }
    let fitted = &design.x * &beta;
    let n = design.nrows();
    let k = design.ncols();
    let df_resid = n.saturating_sub(k);
    let classical = step.xtx_inv;
    let (sigma2, correlation) = residual_moments(design.equations.len(), &design.equation, &design.period, &residuals);
    let ll_whitener = match &options.fixed_covariance {
        Some(_) => whitener.clone(),
        None => {
            let (s, _) = cross_covariance(design, &residuals);
            let mut scratch = Vec::new();
            Whitener::new(design, &usable_covariance(s, &mut scratch)?)?
        }
    };
    let loglik = ll_whitener.loglik(&residuals);
    let (r2, r2_adj) = r_squared(&design.y, &residuals, k);
    let mut fit = FitResult {
        method: Method::SurEgls {
            iterated: options.iterate,
        },
        form: design.form,
        names: design.names.clone(),
        terms: design.terms.clone(),
        coefficients: beta,
        covariance: classical.clone(),
        covariance_kind: CovarianceKind::Classical,
        classical_covariance: classical,
        fitted,
        residuals,
        equations: design.equations.clone(),
        equation: design.equation.clone(),
        period: design.period.clone(),
        sigma2,
        correlation,
        weight_covariance: Some(sigma),
        loglik,
        r2,
        r2_adj,
        df_resid,
        iterations,
        notes,
    };
    if options.robust {
        let robust = white_cross_section_cov(&fit, design)?;
        fit.covariance = robust.matrix;
        fit.covariance_kind = CovarianceKind::WhiteCrossSection;
        fit.notes.extend(robust.notes);
    }
    Ok(fit)
}
