//! The analysis steps behind the commands, as plain functions over
//! in-memory data.

use std::collections::BTreeMap;

use uoh_core::econometrics::adf::{adf_test, AdfTable, Deterministic};
use uoh_core::econometrics::long_run::{LongRun, LongRunTerm};
use uoh_core::econometrics::*;
use uoh_core::indices::{IndexName, IndexSeries};
use uoh_core::panel::{PanelDataset, PanelRow};

use crate::error::Result;

/// One series per country.
pub type CountrySeries = Vec<(String, Vec<f64>)>;

/// (season, value) of the best and the worst season.
pub type Extremes = ((i32, f64), (i32, f64));

/// Per-country ADF results for one variable and deterministic case,
/// combined by Fisher's method.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitRootRow {
    pub variable: String,
    pub deterministic: Deterministic,
    pub fisher: TestResult,
    /// (country, chosen lag, ADF p-value).
    pub countries: Vec<(String, usize, f64)>,
}

impl UnitRootRow {
    pub fn lag_range(&self) -> (usize, usize) {
        let lags = self.countries.iter().map(|c| c.1);
        (lags.clone().min().unwrap_or(0), lags.max().unwrap_or(0))
    }
}

/// ADF-Fisher test over per-country series.
pub fn fisher_adf(
    variable: &str,
    series: &[(String, Vec<f64>)],
    det: Deterministic,
    table: &AdfTable,
) -> Result<UnitRootRow> {
    let mut countries = Vec::with_capacity(series.len());
    for (c, y) in series {
        let r = adf_test(y, det, None, table)?;
        countries.push((c.clone(), r.lag, r.test.p_value));
    }
    let ps: Vec<f64> = countries.iter().map(|c| c.2).collect();
    Ok(UnitRootRow {
        variable: variable.into(),
        deterministic: det,
        fisher: fisher_panel_unit_root(&ps)?,
        countries,
    })
}

fn panel_series(panel: &PanelDataset, f: impl Fn(&PanelRow) -> f64) -> CountrySeries {
    panel
        .countries()
        .map(|c| (c.to_string(), panel.country_rows(c).iter().map(&f).collect()))
        .collect()
}

/// Log index series per country; `None` when a value is not positive.
pub fn log_index_series(panel: &PanelDataset, series: &IndexSeries) -> Option<CountrySeries> {
    let mut out = Vec::new();
    for c in panel.countries() {
        let v = series.country(c);
        if v.is_empty() {
            continue;
        }
        if v.iter().any(|(_, x)| !(*x > 0.0)) {
            return None;
        }
        out.push((c.to_string(), v.iter().map(|(_, x)| x.ln()).collect()));
    }
    Some(out)
}

/// The four panel variables in the order attendance, population, income,
/// unemployment.
pub fn panel_variables(panel: &PanelDataset) -> Vec<(&'static str, CountrySeries)> {
    vec![
        ("ln_att", panel_series(panel, |r| r.ln_att)),
        ("ln_pop", panel_series(panel, |r| r.ln_pop)),
        ("ln_rgni", panel_series(panel, |r| r.ln_rgni)),
        ("ln_un", panel_series(panel, |r| r.ln_un)),
    ]
}

/// Estimation settings shared by every index model.
#[derive(Debug, Clone, PartialEq)]
pub struct FitSettings {
    pub adl_order: usize,
    pub trend_degree: usize,
    pub include_d97: bool,
    pub iterate: bool,
    pub countries: Option<Vec<String>>,
}

impl Default for FitSettings {
    fn default() -> Self {
        FitSettings { adl_order: 2, trend_degree: 2, include_d97: true, iterate: false, countries: None }
    }
}

impl FitSettings {
    pub fn spec(&self, index: IndexName) -> RegressionSpec {
        RegressionSpec {
            index,
            adl_order: self.adl_order,
            trend_degree: self.trend_degree,
            include_d97: self.include_d97,
            countries: self.countries.clone(),
        }
    }
}

/// One index model with its diagnostics.
#[derive(Debug, Clone)]
pub struct IndexFit {
    pub index: IndexName,
    pub design: DesignMatrix,
    pub fit: FitResult,
    /// LM test on first-stage OLS residuals.
    pub lm: Option<TestResult>,
    pub dw: TestResult,
    pub reset: TestResult,
    pub jarque_bera: Vec<(String, TestResult)>,
    /// ADF-Fisher on the residuals, constant and constant plus trend.
    pub residual_unit_root: Vec<UnitRootRow>,
    pub long_run: LongRun,
}

impl IndexFit {
    pub fn elasticity(&self) -> Option<f64> {
        self.long_run.get(LongRunTerm::Regressor(Var::Cb)).map(|e| e.value)
    }
}

/// EGLS-SUR (OLS with the same robust covariance for a single country)
/// on the error-correction design of `index`.
pub fn fit_index(
    panel: &PanelDataset,
    series: &IndexSeries,
    settings: &FitSettings,
    table: &AdfTable,
) -> Result<IndexFit> {
    let spec = settings.spec(series.name);
    let design = build_adl_design(panel, series, &spec)?;
    let ols = ols_fit(&design)?;
    let lm = if design.equations.len() >= 2 { Some(breusch_pagan_lm(&ols)?) } else { None };
    let fit = if design.equations.len() >= 2 {
        sur_egls_fit(&design, &SurOptions { iterate: settings.iterate, ..Default::default() })?
    } else {
        ols_fit_robust(&design)?
    };
    let dw = durbin_watson_panel(&fit)?;
    let reset = ramsey_reset(&fit, &design, &[2, 3])?;
    let jarque_bera = jarque_bera_by_equation(&fit)?;
    let resid: Vec<(String, Vec<f64>)> = fit
        .residuals_by_equation()
        .into_iter()
        .zip(&fit.equations)
        .map(|(s, c)| (c.clone(), s.into_iter().map(|(_, e)| e).collect()))
        .collect();
    let residual_unit_root = Deterministic::ALL
        .iter()
        .map(|d| fisher_adf("residuals", &resid, *d, table))
        .collect::<Result<_>>()?;
    let long_run = long_run_effects(&fit)?;
    Ok(IndexFit { index: series.name, design, fit, lm, dw, reset, jarque_bera, residual_unit_root, long_run })
}

/// Attendance effect of moving from a country's worst to its best season.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectRow {
    pub country: String,
    pub best: f64,
    pub best_season: i32,
    pub worst: f64,
    pub worst_season: i32,
    pub average_attendance: f64,
    pub effect: AttendanceEffect,
}

/// Best (lowest) and worst (highest) index seasons per country; ties go
/// to the earliest season.
pub fn extremes(series: &IndexSeries) -> BTreeMap<String, Extremes> {
    let mut out: BTreeMap<String, Extremes> = BTreeMap::new();
    for ((c, s), v) in &series.values {
        let e = out.entry(c.clone()).or_insert(((*s, *v), (*s, *v)));
        if *v < e.0 .1 {
            e.0 = (*s, *v);
        }
        if *v > e.1 .1 {
            e.1 = (*s, *v);
        }
    }
    out
}

pub fn effects(
    series: &IndexSeries,
    elasticity: f64,
    averages: &BTreeMap<String, f64>,
) -> Result<Vec<EffectRow>> {
    let mut rows = Vec::new();
    for (country, ((bs, b), (ws, w))) in extremes(series) {
        let avg = averages
            .get(&country)
            .copied()
            .ok_or_else(|| uoh_core::Error::Alignment(format!("no average attendance for {country}")))?;
        let effect = attendance_effect(elasticity, b, w, avg)?;
        rows.push(EffectRow {
            country,
            best: b,
            best_season: bs,
            worst: w,
            worst_season: ws,
            average_attendance: avg,
            effect,
        });
    }
    Ok(rows)
}
