//! Stacked regression designs for the attendance equation.
//!
//! The error-correction form regresses the change in log attendance on the
//! lagged levels of every variable plus current and lagged differences;
//! the levels form regresses log attendance on plain lags. Both span the
//! same column space, so they give identical residuals.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::indices::{IndexName, IndexSeries};
use crate::linalg::{Matrix, Vector};
use crate::panel::{PanelDataset, PanelRow};

/// Variables of the attendance equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Var {
    Cb,
    Pop,
    Rgni,
    Un,
    Att,
}

impl Var {
    pub const REGRESSORS: [Var; 4] = [Var::Cb, Var::Pop, Var::Rgni, Var::Un];

    fn stem(self, index: &str) -> String {
        match self {
            Var::Cb => format!("ln_{index}"),
            Var::Pop => "ln_pop".into(),
            Var::Rgni => "ln_rgni".into(),
            Var::Un => "ln_un".into(),
            Var::Att => "ln_att".into(),
        }
    }
}

/// What a design column stands for.
#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    /// Country-specific constant.
    Intercept(usize),
    /// `var` lagged `lag` seasons (lag 0 = current).
    Level { var: Var, lag: usize },
    /// First difference of `var`, lagged `lag` seasons.
    Diff { var: Var, lag: usize },
    D97,
    /// t raised to this power.
    Trend(u32),
    Other,
}

impl Term {
    /// Column name as it appears in coefficient tables.
    pub fn name(&self, index_code: &str) -> String {
        let lagged = |stem: String, lag: usize| if lag == 0 { stem } else { format!("{stem}(-{lag})") };
        match self {
            Term::Intercept(i) => format!("c{i}"),
            Term::Level { var, lag } => lagged(var.stem(index_code), *lag),
            Term::Diff { var, lag } => lagged(format!("d_{}", var.stem(index_code)), *lag),
            Term::D97 => "d97".into(),
            Term::Trend(1) => "t".into(),
            Term::Trend(g) => format!("t^{g}"),
            Term::Other => "other".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    /// Dependent Δln ATT_t; lagged levels plus differences.
    ErrorCorrection,
    /// Dependent ln ATT_t; plain lags.
    Levels,
    /// Any other stacked system.
    Generic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionSpec {
    pub index: IndexName,
    /// ADL order p (lags of every variable up to p).
    pub adl_order: usize,
    /// Degree m of the polynomial trend.
    pub trend_degree: usize,
    pub include_d97: bool,
    /// Restrict to these countries; all panel countries when `None`.
    pub countries: Option<Vec<String>>,
}

impl RegressionSpec {
    pub fn new(index: IndexName) -> Self {
        RegressionSpec {
            index,
            adl_order: 2,
            trend_degree: 2,
            include_d97: true,
            countries: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.adl_order < 1 {
            return Err(Error::InvalidParameter("ADL order must be at least 1".into()));
        }
        Ok(())
    }
}

/// A stacked system: one block of rows per equation (country), each row
/// tagged with its period so cross-equation blocks can be formed.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    pub y: Vector,
    pub x: Matrix,
    pub names: Vec<String>,
    pub terms: Vec<Term>,
    pub response: String,
    pub equations: Vec<String>,
    /// Equation of each row.
    pub equation: Vec<usize>,
    /// Period (season) of each row.
    pub period: Vec<i32>,
    pub form: Form,
}

impl DesignMatrix {
    /// Generic stacked system; rows must be grouped by equation.
    pub fn new(
        y: Vector,
        x: Matrix,
        names: Vec<String>,
        equations: Vec<String>,
        equation: Vec<usize>,
        period: Vec<i32>,
    ) -> Result<Self> {
        let n = y.len();
        if x.nrows() != n || equation.len() != n || period.len() != n || names.len() != x.ncols() {
            return Err(Error::InvalidParameter("design dimensions disagree".into()));
        }
        if equation.iter().any(|&e| e >= equations.len()) {
            return Err(Error::InvalidParameter("row refers to an unknown equation".into()));
        }
        let terms = alloc::vec![Term::Other; names.len()];
        Ok(DesignMatrix {
            y,
            x,
            names,
            terms,
            response: "y".into(),
            equations,
            equation,
            period,
            form: Form::Generic,
        })
    }

    /// Single-equation design with consecutive periods 1..=n.
    pub fn single(y: Vector, x: Matrix, names: Vec<String>) -> Result<Self> {
        let n = y.len();
        DesignMatrix::new(
            y,
            x,
            names,
            alloc::vec!["eq".to_string()],
            alloc::vec![0; n],
            (1..=n as i32).collect(),
        )
    }

    pub fn nrows(&self) -> usize {
        self.y.len()
    }

    pub fn ncols(&self) -> usize {
        self.x.ncols()
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Rows of each equation.
    pub fn rows_by_equation(&self) -> Vec<Vec<usize>> {
        let mut out = alloc::vec![Vec::new(); self.equations.len()];
        for (row, &e) in self.equation.iter().enumerate() {
            out[e].push(row);
        }
        out
    }

    /// Rows of each period, in equation order.
    pub fn rows_by_period(&self) -> BTreeMap<i32, Vec<usize>> {
        let mut out: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
        for (row, &p) in self.period.iter().enumerate() {
            out.entry(p).or_default().push(row);
        }
        for rows in out.values_mut() {
            rows.sort_by_key(|&r| self.equation[r]);
        }
        out
    }

    /// Copy with extra columns appended.
    pub fn with_columns(&self, extra: &[(String, Vector)]) -> DesignMatrix {
        let k = self.ncols();
        let mut x = self.x.clone().resize_horizontally(k + extra.len(), 0.0);
        let mut names = self.names.clone();
        let mut terms = self.terms.clone();
        for (j, (name, col)) in extra.iter().enumerate() {
            x.set_column(k + j, col);
            names.push(name.clone());
            terms.push(Term::Other);
        }
        DesignMatrix {
            x,
            names,
            terms,
            ..self.clone()
        }
    }
}

/// Log index values of one country over a maximal run of panel seasons.
struct CountryRun<'a> {
    rows: Vec<&'a PanelRow>,
    ln_cb: Vec<f64>,
}

fn country_run<'a>(
    panel: &'a PanelDataset,
    index: &IndexSeries,
    country: &str,
) -> Result<CountryRun<'a>> {
    let rows = panel.country_rows(country);
    let present: Vec<usize> = rows
        .iter()
        .enumerate()
        .filter(|(_, r)| index.get(country, r.season).is_some())
        .map(|(i, _)| i)
        .collect();
    let (Some(&first), Some(&last)) = (present.first(), present.last()) else {
        return Err(Error::Alignment(format!(
            "no {} values for {country} within the panel",
            index.name
        )));
    };
    if last - first + 1 != present.len() {
        return Err(Error::Alignment(format!(
            "{} series for {country} has gaps inside the panel span",
            index.name
        )));
    }
    let rows: Vec<&PanelRow> = rows[first..=last].iter().collect();
    let mut ln_cb = Vec::with_capacity(rows.len());
    for r in &rows {
        let v = index.get(country, r.season).unwrap_or(f64::NAN);
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::LogDomain {
                country: country.to_string(),
                season: r.season,
                variable: index.name.code().to_string(),
                value: v,
            });
        }
        ln_cb.push(libm::log(v));
    }
    Ok(CountryRun { rows, ln_cb })
}

impl CountryRun<'_> {
    fn value(&self, var: Var, pos: usize) -> f64 {
        let r = self.rows[pos];
        match var {
            Var::Cb => self.ln_cb[pos],
            Var::Pop => r.ln_pop,
            Var::Rgni => r.ln_rgni,
            Var::Un => r.ln_un,
            Var::Att => r.ln_att,
        }
    }
}

fn columns(spec: &RegressionSpec, countries: &[String], form: Form) -> (Vec<Term>, Vec<String>) {
    let p = spec.adl_order;
    let code = spec.index.code();
    let mut terms = Vec::new();
    let mut names = Vec::new();
    for (i, c) in countries.iter().enumerate() {
        terms.push(Term::Intercept(i));
        names.push(format!("C_{c}"));
    }
    let lag_name = |stem: &str, lag: usize| {
        if lag == 0 {
            stem.to_string()
        } else {
            format!("{stem}(-{lag})")
        }
    };
    match form {
        Form::ErrorCorrection => {
            for var in Var::REGRESSORS {
                let stem = var.stem(code);
                terms.push(Term::Level { var, lag: 1 });
                names.push(lag_name(&stem, 1));
                for lag in 0..p {
                    terms.push(Term::Diff { var, lag });
                    names.push(lag_name(&format!("d_{stem}"), lag));
                }
            }
            terms.push(Term::Level { var: Var::Att, lag: 1 });
            names.push("ln_att(-1)".into());
            for lag in 1..p {
                terms.push(Term::Diff { var: Var::Att, lag });
                names.push(lag_name("d_ln_att", lag));
            }
        }
        Form::Levels | Form::Generic => {
            for var in Var::REGRESSORS {
                let stem = var.stem(code);
                for lag in 0..=p {
                    terms.push(Term::Level { var, lag });
                    names.push(lag_name(&stem, lag));
                }
            }
            for lag in 1..=p {
                terms.push(Term::Level { var: Var::Att, lag });
                names.push(lag_name("ln_att", lag));
            }
        }
    }
    if spec.include_d97 {
        terms.push(Term::D97);
        names.push("d97".into());
    }
    for g in 1..=spec.trend_degree as u32 {
        terms.push(Term::Trend(g));
        names.push(if g == 1 { "t".into() } else { format!("t^{g}") });
    }
    (terms, names)
}

fn build(panel: &PanelDataset, index: &IndexSeries, spec: &RegressionSpec, form: Form) -> Result<DesignMatrix> {
    spec.validate()?;
    let p = spec.adl_order;
    let countries: Vec<String> = match &spec.countries {
        Some(list) => {
            for c in list {
                if panel.country_rows(c).is_empty() {
                    return Err(Error::Alignment(format!("country {c} is not in the panel")));
                }
            }
            let mut l = list.clone();
            l.sort();
            l.dedup();
            l
        }
        None => panel.countries().map(ToString::to_string).collect(),
    };
    for (c, _) in index.values.keys() {
        if panel.country_rows(c).is_empty() {
            return Err(Error::Alignment(format!(
                "{} series has values for {c}, which is not in the panel",
                index.name
            )));
        }
    }
    let runs: Vec<CountryRun<'_>> = countries
        .iter()
        .map(|c| country_run(panel, index, c))
        .collect::<Result<_>>()?;
    for (c, run) in countries.iter().zip(&runs) {
        if run.rows.len() <= p {
            return Err(Error::Alignment(format!(
                "{c}: {} aligned seasons leave no rows at ADL order {p}",
                run.rows.len()
            )));
        }
    }
    let (terms, names) = columns(spec, &countries, form);
    let nrows: usize = runs.iter().map(|r| r.rows.len() - p).sum();
    let mut x = Matrix::zeros(nrows, terms.len());
    let mut y = Vector::zeros(nrows);
    let mut equation = Vec::with_capacity(nrows);
    let mut period = Vec::with_capacity(nrows);
    let mut row = 0;
    for (ci, run) in runs.iter().enumerate() {
        for pos in p..run.rows.len() {
            let r = run.rows[pos];
            let level = |var: Var, lag: usize| run.value(var, pos - lag);
            let diff = |var: Var, lag: usize| level(var, lag) - level(var, lag + 1);
            y[row] = match form {
                Form::ErrorCorrection => diff(Var::Att, 0),
                _ => level(Var::Att, 0),
            };
            for (j, term) in terms.iter().enumerate() {
                x[(row, j)] = match *term {
                    Term::Intercept(c) => f64::from(u8::from(c == ci)),
                    Term::Level { var, lag } => level(var, lag),
                    Term::Diff { var, lag } => diff(var, lag),
                    Term::D97 => r.d97,
                    Term::Trend(g) => r.trend_power(g as usize),
                    Term::Other => 0.0,
                };
            }
            equation.push(ci);
            period.push(r.season);
            row += 1;
        }
    }
    Ok(DesignMatrix {
        y,
        x,
        names,
        terms,
        response: match form {
            Form::ErrorCorrection => "d_ln_att".into(),
            _ => "ln_att".into(),
        },
        equations: countries,
        equation,
        period,
        form,
    })
}

/// Error-correction (levels plus differences) design; the first
/// `adl_order` aligned seasons of every country are used up as lags.
pub fn build_adl_design(panel: &PanelDataset, index: &IndexSeries, spec: &RegressionSpec) -> Result<DesignMatrix> {
    build(panel, index, spec, Form::ErrorCorrection)
}

/// Plain-lag design on the same rows as [`build_adl_design`].
pub fn build_adl_levels_design(
    panel: &PanelDataset,
    index: &IndexSeries,
    spec: &RegressionSpec,
) -> Result<DesignMatrix> {
    build(panel, index, spec, Form::Levels)
}
