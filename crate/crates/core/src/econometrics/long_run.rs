//! Long-run elasticities of the attendance equation and the implied
//! attendance effect of a change in competitive balance.

use alloc::string::String;
use alloc::vec::Vec;

use super::design::{Form, Term, Var};
use super::fit::FitResult;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::stats;

/// Smallest adjustment speed for which a long-run relation exists.
pub const MIN_ADJUSTMENT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LongRunTerm {
    Regressor(Var),
    Trend(u32),
    D97,
}

impl LongRunTerm {
    pub fn label(self, index_code: &str) -> String {
        match self {
            LongRunTerm::Regressor(Var::Cb) => alloc::format!("ln_{index_code}"),
            LongRunTerm::Regressor(Var::Pop) => "ln_pop".into(),
            LongRunTerm::Regressor(Var::Rgni) => "ln_rgni".into(),
            LongRunTerm::Regressor(Var::Un) => "ln_un".into(),
            LongRunTerm::Regressor(Var::Att) => "ln_att".into(),
            LongRunTerm::Trend(1) => "t".into(),
            LongRunTerm::Trend(g) => alloc::format!("t^{g}"),
            LongRunTerm::D97 => "d97".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LongRunEffect {
    pub term: LongRunTerm,
    pub value: f64,
    /// Delta-method standard error (NaN without a covariance).
    pub se: f64,
    /// Two-sided normal p-value (NaN without a covariance).
    pub p_value: f64,
}

impl LongRunEffect {
    pub fn stars(&self) -> &'static str {
        if self.p_value.is_nan() {
            ""
        } else {
            stats::stars(self.p_value)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LongRun {
    /// Adjustment speed A(1).
    pub adjustment: f64,
    /// Regressors in order CB, POP, RGNI, UN, then trend powers, then d97.
    pub effects: Vec<LongRunEffect>,
}

impl LongRun {
    pub fn get(&self, term: LongRunTerm) -> Option<&LongRunEffect> {
        self.effects.iter().find(|e| e.term == term)
    }
}

/// Long-run effects of a fitted attendance equation, with standard errors
/// from the fit's reported covariance.
pub fn long_run_effects(fit: &FitResult) -> Result<LongRun> {
    long_run_from_coefficients(fit.form, &fit.terms, fit.coefficients.as_slice(), Some(&fit.covariance))
}

/// Long-run effects from a coefficient vector laid out by `terms`.
///
/// Error-correction form: effect = coefficient on the lagged level divided
/// by A(1), the negated coefficient on lagged log attendance. Levels form:
/// effect = sum of the lag coefficients divided by 1 - sum of the
/// attendance lag coefficients. Trend and dummy effects are their
/// coefficients divided by A(1).
pub fn long_run_from_coefficients(
    form: Form,
    terms: &[Term],
    coefficients: &[f64],
    covariance: Option<&Matrix>,
) -> Result<LongRun> {
    if terms.len() != coefficients.len() {
        return Err(Error::InvalidParameter("one coefficient per term expected".into()));
    }
    let k = terms.len();
    // A(1) and its gradient
    let mut a_grad = Vector::zeros(k);
    let adjustment = match form {
        Form::ErrorCorrection => {
            let j = terms
                .iter()
                .position(|t| *t == Term::Level { var: Var::Att, lag: 1 })
                .ok_or_else(|| Error::InvalidParameter("no lagged attendance level term".into()))?;
            a_grad[j] = -1.0;
            -coefficients[j]
        }
        Form::Levels => {
            let mut a = 1.0;
            for (j, t) in terms.iter().enumerate() {
                if let Term::Level { var: Var::Att, lag } = t {
                    if *lag >= 1 {
                        a -= coefficients[j];
                        a_grad[j] = -1.0;
                    }
                }
            }
            a
        }
        Form::Generic => {
            return Err(Error::InvalidParameter(
                "long-run effects need an attendance-equation design".into(),
            ))
        }
    };
    if !(libm::fabs(adjustment) >= MIN_ADJUSTMENT) {
        return Err(Error::NoErrorCorrection(adjustment));
    }
    let mut targets: Vec<(LongRunTerm, Vec<usize>)> = Vec::new();
    for var in Var::REGRESSORS {
        let cols: Vec<usize> = terms
            .iter()
            .enumerate()
            .filter(|(_, t)| match (form, t) {
                (Form::ErrorCorrection, Term::Level { var: v, lag: 1 }) => *v == var,
                (Form::Levels, Term::Level { var: v, .. }) => *v == var,
                _ => false,
            })
            .map(|(j, _)| j)
            .collect();
        if !cols.is_empty() {
            targets.push((LongRunTerm::Regressor(var), cols));
        }
    }
    let mut trends: Vec<(u32, usize)> = terms
        .iter()
        .enumerate()
        .filter_map(|(j, t)| match t {
            Term::Trend(g) => Some((*g, j)),
            _ => None,
        })
        .collect();
    trends.sort();
    targets.extend(trends.into_iter().map(|(g, j)| (LongRunTerm::Trend(g), alloc::vec![j])));
    if let Some(j) = terms.iter().position(|t| *t == Term::D97) {
        targets.push((LongRunTerm::D97, alloc::vec![j]));
    }
    let effects = targets
        .into_iter()
        .map(|(term, cols)| {
            let b: f64 = cols.iter().map(|&j| coefficients[j]).sum();
            let value = b / adjustment;
            // d(b/A) = db/A - b/A^2 dA
            let mut grad = &a_grad * (-b / (adjustment * adjustment));
            for &j in &cols {
                grad[j] += 1.0 / adjustment;
            }
            let (se, p_value) = match covariance {
                Some(v) => {
                    let var = (grad.transpose() * v * &grad)[(0, 0)];
                    let se = libm::sqrt(var.max(0.0));
                    (se, stats::normal_two_sided(value / se))
                }
                None => (f64::NAN, f64::NAN),
            };
            LongRunEffect {
                term,
                value,
                se,
                p_value,
            }
        })
        .collect();
    Ok(LongRun { adjustment, effects })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttendanceEffect {
    /// Proportional change in attendance (0.389 = 38.9%).
    pub relative: f64,
    pub fans_per_game: f64,
}

/// Attendance gained by moving from the worst to the best balance value:
/// `|elasticity| (worst - best) / worst`, and that share of the average
/// attendance.
pub fn attendance_effect(elasticity: f64, cb_best: f64, cb_worst: f64, avg_attendance: f64) -> Result<AttendanceEffect> {
    if !(cb_worst > 0.0) {
        return Err(Error::OutOfRange {
            what: "worst balance value",
            value: cb_worst,
            detail: "must be positive".into(),
        });
    }
    if !(avg_attendance > 0.0) {
        return Err(Error::OutOfRange {
            what: "average attendance",
            value: avg_attendance,
            detail: "must be positive".into(),
        });
    }
    if cb_best > cb_worst {
        return Err(Error::ArgumentOrder {
            best: cb_best,
            worst: cb_worst,
        });
    }
    let relative = libm::fabs(elasticity) * (cb_worst - cb_best) / cb_worst;
    Ok(AttendanceEffect {
        relative,
        fans_per_game: relative * avg_attendance,
    })
}
