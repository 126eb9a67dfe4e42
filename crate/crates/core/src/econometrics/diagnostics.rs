//! Residual diagnostics and p-value combination.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::design::DesignMatrix;
use super::fit::FitResult;
use super::sur::Whitener;
use crate::error::{Error, Result};
use crate::linalg::{least_squares, Vector};
use crate::stats;

/// Degrees of freedom of a reference distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Df {
    None,
    One(f64),
    Two(f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestResult {
    pub name: String,
    pub statistic: f64,
    pub df: Df,
    pub p_value: f64,
    /// Reference distribution and anything worth flagging.
    pub note: String,
}

impl TestResult {
    pub fn rejects(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

/// Fisher's combination `-2 sum ln p_i` on chi-square with `2n` df.
/// A zero p-value gives an infinite statistic and a combined p of 0.
pub fn fisher_panel_unit_root(p_values: &[f64]) -> Result<TestResult> {
    if p_values.is_empty() {
        return Err(Error::NothingToTest("no p-values to combine"));
    }
    if let Some(&bad) = p_values.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::OutOfRange {
            what: "p-value",
            value: bad,
            detail: "must lie in [0, 1]".into(),
        });
    }
    let df = 2.0 * p_values.len() as f64;
    if p_values.contains(&0.0) {
        return Ok(TestResult {
            name: "ADF-Fisher".into(),
            statistic: f64::INFINITY,
            df: Df::One(df),
            p_value: 0.0,
            note: "chi-square; a component p-value is 0".into(),
        });
    }
    let lambda = -2.0 * p_values.iter().map(|p| libm::log(*p)).sum::<f64>();
    Ok(TestResult {
        name: "ADF-Fisher".into(),
        statistic: lambda,
        df: Df::One(df),
        p_value: stats::chi2_sf(lambda, df),
        note: "chi-square".into(),
    })
}

/// Breusch-Pagan LM test of zero contemporaneous correlation:
/// `sum_{i<j} T_ij r_ij^2` on chi-square with one df per pair, where
/// `r_ij` is computed over the `T_ij` shared periods.
pub fn breusch_pagan_lm(fit: &FitResult) -> Result<TestResult> {
    let by_eq = fit.residuals_by_equation();
    let m = by_eq.len();
    if m < 2 {
        return Err(Error::NothingToTest("LM test needs at least two equations"));
    }
    let maps: Vec<alloc::collections::BTreeMap<i32, f64>> =
        by_eq.iter().map(|v| v.iter().copied().collect()).collect();
    let mut lambda = 0.0;
    let mut pairs = 0usize;
    let mut skipped = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            let (mut sij, mut sii, mut sjj, mut t) = (0.0, 0.0, 0.0, 0usize);
            for (p, ei) in &maps[i] {
                if let Some(ej) = maps[j].get(p) {
                    sij += ei * ej;
                    sii += ei * ei;
                    sjj += ej * ej;
                    t += 1;
                }
            }
            if t == 0 || sii == 0.0 || sjj == 0.0 {
                skipped.push(format!("{}/{}", fit.equations[i], fit.equations[j]));
                continue;
            }
            let r2 = sij * sij / (sii * sjj);
            lambda += t as f64 * r2;
            pairs += 1;
        }
    }
    if pairs == 0 {
        return Err(Error::InsufficientOverlap("no pair of equations shares a period".into()));
    }
    let mut note = String::from("chi-square");
    if !skipped.is_empty() {
        note = format!("{note}; pairs without overlap excluded: {}", skipped.join(", "));
    }
    Ok(TestResult {
        name: "Breusch-Pagan LM".into(),
        statistic: lambda,
        df: Df::One(pairs as f64),
        p_value: stats::chi2_sf(lambda, pairs as f64),
        note,
    })
}

/// Pooled Durbin-Watson statistic over per-equation residual series. The
/// p-value (two-sided) uses the normal approximation `d ~ N(2, 4/N)`.
pub fn durbin_watson_panel(fit: &FitResult) -> Result<TestResult> {
    let mut num = 0.0;
    let mut den = 0.0;
    let mut n = 0usize;
    for series in fit.residuals_by_equation() {
        if series.len() < 2 {
            return Err(Error::TooShort { needed: 2, got: series.len() });
        }
        for w in series.windows(2) {
            let d = w[1].1 - w[0].1;
            num += d * d;
        }
        den += series.iter().map(|(_, e)| e * e).sum::<f64>();
        n += series.len();
    }
    if den == 0.0 {
        return Err(Error::Degenerate("residual sum of squares is zero".into()));
    }
    let d = num / den;
    let z = (d - 2.0) / libm::sqrt(4.0 / n as f64);
    Ok(TestResult {
        name: "Durbin-Watson".into(),
        statistic: d,
        df: Df::None,
        p_value: stats::normal_two_sided(z),
        note: "normal approximation".into(),
    })
}

/// Jarque-Bera normality test on chi-square with 2 df.
pub fn jarque_bera(residuals: &[f64]) -> Result<TestResult> {
    if residuals.len() < 8 {
        return Err(Error::TooShort { needed: 8, got: residuals.len() });
    }
    if stats::variance(residuals) <= 0.0 {
        return Err(Error::Degenerate("residuals have zero variance".into()));
    }
    let (s, k) = stats::skew_kurt(residuals);
    let jb = residuals.len() as f64 / 6.0 * (s * s + (k - 3.0) * (k - 3.0) / 4.0);
    Ok(TestResult {
        name: "Jarque-Bera".into(),
        statistic: jb,
        df: Df::One(2.0),
        p_value: stats::chi2_sf(jb, 2.0),
        note: "chi-square".into(),
    })
}

/// Jarque-Bera for every equation of a fit, in equation order.
pub fn jarque_bera_by_equation(fit: &FitResult) -> Result<Vec<(String, TestResult)>> {
    fit.residuals_by_equation()
        .into_iter()
        .zip(&fit.equations)
        .map(|(series, name)| {
            let e: Vec<f64> = series.into_iter().map(|(_, e)| e).collect();
            jarque_bera(&e).map(|t| (name.clone(), t))
        })
        .collect()
}

/// Ramsey RESET: F-test on powers of the standardized fitted values added
/// to the design. For a GLS fit both regressions run on the whitened
/// system.
pub fn ramsey_reset(fit: &FitResult, design: &DesignMatrix, powers: &[u32]) -> Result<TestResult> {
    if powers.is_empty() {
        return Err(Error::NothingToTest("RESET needs at least one power"));
    }
    if powers.iter().any(|&p| p < 2) {
        return Err(Error::InvalidParameter("RESET powers must be at least 2".into()));
    }
    let yhat: Vec<f64> = fit.fitted.iter().copied().collect();
    let sd = libm::sqrt(stats::variance(&yhat));
    if !(sd > 0.0) {
        return Err(Error::Degenerate("fitted values are constant".into()));
    }
    let mean = stats::mean(&yhat);
    let extra: Vec<(String, Vector)> = powers
        .iter()
        .map(|&p| {
            let col = Vector::from_iterator(yhat.len(), yhat.iter().map(|v| libm::pow((v - mean) / sd, p as f64)));
            (format!("fitted^{p}"), col)
        })
        .collect();
    let augmented = design.with_columns(&extra);
    let whitener = match &fit.weight_covariance {
        Some(sigma) => Whitener::new(design, sigma)?,
        None => Whitener::identity(design),
    };
    let ys = whitener.apply_vec(&design.y);
    let restricted = least_squares(&ys, &whitener.apply(&design.x), &design.names)?;
    let unrestricted = least_squares(&ys, &whitener.apply(&augmented.x), &augmented.names)?;
    let q = powers.len() as f64;
    let df2 = design.nrows() as f64 - augmented.ncols() as f64;
    if df2 <= 0.0 {
        return Err(Error::TooShort {
            needed: augmented.ncols() + 1,
            got: design.nrows(),
        });
    }
    let f = ((restricted.ssr - unrestricted.ssr) / q) / (unrestricted.ssr / df2);
    let f = f.max(0.0);
    Ok(TestResult {
        name: "RESET".into(),
        statistic: f,
        df: Df::Two(q, df2),
        p_value: stats::f_sf(f, q, df2),
        note: "F".into(),
    })
}
