//! Report tables as CSV bytes and aligned text.

use uoh_core::econometrics::adf::Deterministic;
use uoh_core::econometrics::long_run::LongRunTerm;
use uoh_core::econometrics::{CovarianceKind, Df, Method, Term, TestResult, Var};
use uoh_core::indices::IndexName;
use uoh_core::stats::stars;

use crate::io::{csv_bytes, fmt_num, LONG_RUN_HEADER};
use crate::pipeline::{EffectRow, IndexFit, UnitRootRow};

/// Aligned plain-text table: first column left, the rest right.
pub fn render(title: &str, header: &[&str], rows: &[Vec<String>], notes: &[String]) -> String {
    let cols = header.len();
    let mut width: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (j, cell) in r.iter().enumerate().take(cols) {
            width[j] = width[j].max(cell.chars().count());
        }
    }
    let line = |cells: &mut dyn Iterator<Item = &str>| -> String {
        let mut s = String::new();
        for (j, c) in cells.enumerate() {
            let pad = width[j] - c.chars().count();
            if j == 0 {
                s.push_str(c);
                s.push_str(&" ".repeat(pad));
            } else {
                s.push_str("  ");
                s.push_str(&" ".repeat(pad));
                s.push_str(c);
            }
        }
        s.trim_end().to_string()
    };
    let total: usize = width.iter().sum::<usize>() + 2 * (cols - 1);
    let mut out = String::new();
    out.push_str(title);
    out.push('\n');
    out.push_str(&"=".repeat(total.max(title.len())));
    out.push('\n');
    out.push_str(&line(&mut header.iter().copied()));
    out.push('\n');
    out.push_str(&"-".repeat(total));
    out.push('\n');
    for r in rows {
        out.push_str(&line(&mut r.iter().map(String::as_str)));
        out.push('\n');
    }
    for n in notes {
        out.push_str(n);
        out.push('\n');
    }
    out
}

fn fixed(x: f64, digits: usize) -> String {
    if x.is_nan() {
        "NA".into()
    } else {
        let s = format!("{x:.digits$}");
        // avoid "-0.000"
        if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') { s.trim_start_matches('-').into() } else { s }
    }
}

fn df_cells(df: Df) -> (String, String) {
    match df {
        Df::None => (String::new(), String::new()),
        Df::One(a) => (fmt_num(a), String::new()),
        Df::Two(a, b) => (fmt_num(a), fmt_num(b)),
    }
}

fn method_label(f: &IndexFit) -> String {
    let method = match f.fit.method {
        Method::Ols => "OLS".to_string(),
        Method::SurEgls { iterated: false } => "EGLS-SUR (two-step)".to_string(),
        Method::SurEgls { iterated: true } => format!("EGLS-SUR (iterated, {} iterations)", f.fit.iterations),
    };
    let cov = match f.fit.covariance_kind {
        CovarianceKind::Classical => "classical",
        CovarianceKind::WhiteCrossSection => "White cross-section",
    };
    format!("{method}, {cov} standard errors in parentheses")
}

const STAR_NOTE: &str = "* p < 0.10, ** p < 0.05, *** p < 0.01";

pub fn unit_root_csv(rows: &[UnitRootRow]) -> Vec<u8> {
    csv_bytes(
        &["variable", "case", "statistic", "df", "p_value", "stars", "lag_min", "lag_max", "country_lags"],
        rows.iter().map(|r| {
            let (lo, hi) = r.lag_range();
            vec![
                r.variable.clone(),
                r.deterministic.code().into(),
                fmt_num(r.fisher.statistic),
                df_cells(r.fisher.df).0,
                fmt_num(r.fisher.p_value),
                stars(r.fisher.p_value).into(),
                lo.to_string(),
                hi.to_string(),
                r.countries.iter().map(|(c, l, _)| format!("{c}:{l}")).collect::<Vec<_>>().join(";"),
            ]
        }),
    )
}

fn fisher_cell(r: &UnitRootRow) -> (String, String) {
    let (lo, hi) = r.lag_range();
    (format!("{}{}", fixed(r.fisher.statistic, 3), stars(r.fisher.p_value)), format!("({lo}-{hi})"))
}

pub fn unit_root_text(rows: &[UnitRootRow]) -> String {
    let mut variables: Vec<&str> = Vec::new();
    for r in rows {
        if !variables.contains(&r.variable.as_str()) {
            variables.push(&r.variable);
        }
    }
    let table: Vec<Vec<String>> = variables
        .iter()
        .map(|v| {
            let mut cells = vec![v.to_string()];
            for det in Deterministic::ALL {
                match rows.iter().find(|r| r.variable == *v && r.deterministic == det) {
                    Some(r) => {
                        let (a, b) = fisher_cell(r);
                        cells.push(a);
                        cells.push(b);
                    }
                    None => cells.extend([String::new(), String::new()]),
                }
            }
            cells
        })
        .collect();
    render(
        "ADF-Fisher panel unit-root tests (chi-square statistic)",
        &["Variable", "Constant", "(p)", "Constant & trend", "(p)"],
        &table,
        &[STAR_NOTE.into(), "p = range of SIC-selected lag lengths across countries".into()],
    )
}

pub fn coefficients_csv(fits: &[IndexFit]) -> Vec<u8> {
    csv_bytes(
        &["index", "term", "coefficient", "std_error", "p_value", "stars"],
        fits.iter().flat_map(|f| {
            let se = f.fit.std_errors();
            let p = f.fit.p_values();
            (0..f.fit.names.len())
                .map(|j| {
                    vec![
                        f.index.code().into(),
                        f.fit.names[j].clone(),
                        fmt_num(f.fit.coefficients[j]),
                        fmt_num(se[j]),
                        fmt_num(p[j]),
                        stars(p[j]).into(),
                    ]
                })
                .collect::<Vec<_>>()
        }),
    )
}

fn test_row(index: IndexName, equation: &str, t: &TestResult) -> Vec<String> {
    let (d1, d2) = df_cells(t.df);
    vec![index.code().into(), t.name.clone(), equation.into(), fmt_num(t.statistic), d1, d2, fmt_num(t.p_value)]
}

pub fn diagnostics_csv(fits: &[IndexFit]) -> Vec<u8> {
    let mut rows = Vec::new();
    for f in fits {
        if let Some(lm) = &f.lm {
            rows.push(test_row(f.index, "", lm));
        }
        rows.push(test_row(f.index, "", &f.dw));
        rows.push(test_row(f.index, "", &f.reset));
        for (c, t) in &f.jarque_bera {
            rows.push(test_row(f.index, c, t));
        }
        for r in &f.residual_unit_root {
            let mut t = r.fisher.clone();
            t.name = format!("ADF-Fisher residuals ({})", r.deterministic.code());
            rows.push(test_row(f.index, "", &t));
        }
    }
    csv_bytes(&["index", "test", "equation", "statistic", "df1", "df2", "p_value"], rows)
}

pub fn fit_summary_csv(fits: &[IndexFit]) -> Vec<u8> {
    csv_bytes(
        &["index", "method", "covariance", "iterations", "nobs", "equations", "loglik", "r2", "r2_adj"],
        fits.iter().map(|f| {
            vec![
                f.index.code().into(),
                match f.fit.method {
                    Method::Ols => "ols".into(),
                    Method::SurEgls { iterated } => if iterated { "sur_iterated".into() } else { "sur_two_step".into() },
                },
                match f.fit.covariance_kind {
                    CovarianceKind::Classical => "classical".into(),
                    CovarianceKind::WhiteCrossSection => "white_cross_section".into(),
                },
                f.fit.iterations.to_string(),
                f.fit.nobs().to_string(),
                f.fit.equations.len().to_string(),
                fmt_num(f.fit.loglik),
                fmt_num(f.fit.r2),
                fmt_num(f.fit.r2_adj),
            ]
        }),
    )
}

fn coef_cell(f: &IndexFit, name: &str) -> String {
    match f.fit.position(name) {
        Some(j) => {
            let se = f.fit.std_errors()[j];
            let p = f.fit.p_values()[j];
            let d = match f.fit.terms[j] {
                Term::Trend(g) if g >= 2 => 5,
                _ => 3,
            };
            format!("{}{} ({})", fixed(f.fit.coefficients[j], d), stars(p), fixed(se, d))
        }
        None => String::new(),
    }
}

/// One block per index: lagged levels, differences, deterministic terms
/// and the diagnostic line.
pub fn coefficients_text(fits: &[IndexFit]) -> String {
    let mut out = String::new();
    for f in fits {
        let code = f.index.code();
        let vars = [format!("ln_{code}"), "ln_pop".into(), "ln_rgni".into(), "ln_un".into(), "ln_att".into()];
        let mut rows = vec![
            std::iter::once("level(-1)".to_string()).chain(vars.iter().map(|v| coef_cell(f, &format!("{v}(-1)")))).collect(),
        ];
        let max_lag = f
            .fit
            .terms
            .iter()
            .filter_map(|t| match t {
                Term::Diff { lag, .. } => Some(*lag),
                _ => None,
            })
            .max();
        if let Some(max_lag) = max_lag {
            for lag in 0..=max_lag {
                let label = if lag == 0 { "diff".to_string() } else { format!("diff(-{lag})") };
                let mut r = vec![label];
                for v in &vars {
                    let name = if lag == 0 { format!("d_{v}") } else { format!("d_{v}(-{lag})") };
                    r.push(coef_cell(f, &name));
                }
                rows.push(r);
            }
        }
        let mut notes = Vec::new();
        let det: Vec<String> = f
            .fit
            .names
            .iter()
            .zip(&f.fit.terms)
            .filter(|(_, t)| matches!(t, Term::D97 | Term::Trend(_)))
            .map(|(n, _)| format!("{n} {}", coef_cell(f, n)))
            .collect();
        notes.push(det.join("   "));
        notes.push(format!(
            "D-W {}   R2_adj {}   RESET F {} (p {})   {}",
            fixed(f.dw.statistic, 3),
            fixed(f.fit.r2_adj, 3),
            fixed(f.reset.statistic, 3),
            fixed(f.reset.p_value, 3),
            f.lm.as_ref().map_or(String::new(), |lm| format!("LM {}{} (df {})", fixed(lm.statistic, 3), stars(lm.p_value), df_cells(lm.df).0)),
        ));
        let fisher: Vec<String> = f
            .residual_unit_root
            .iter()
            .map(|r| {
                let (a, b) = fisher_cell(r);
                format!("{} {a} {b}", if r.deterministic == Deterministic::Constant { "constant" } else { "constant & trend" })
            })
            .collect();
        notes.push(format!("ADF-Fisher on residuals: {}", fisher.join("   ")));
        notes.push(format!(
            "Jarque-Bera p-values: {}",
            f.jarque_bera.iter().map(|(c, t)| format!("{c} {}", fixed(t.p_value, 3))).collect::<Vec<_>>().join("  ")
        ));
        notes.push(method_label(f));
        for n in &f.fit.notes {
            notes.push(format!("note: {n}"));
        }
        notes.push(STAR_NOTE.into());
        let header: Vec<&str> = std::iter::once("").chain(vars.iter().map(String::as_str)).collect();
        out.push_str(&render(
            &format!("{} model, dependent variable d_ln_att", f.index.label()),
            &header,
            &rows,
            &notes,
        ));
        out.push('\n');
    }
    out
}

fn long_run_terms(fits: &[IndexFit]) -> Vec<LongRunTerm> {
    let mut terms: Vec<LongRunTerm> = Vec::new();
    for f in fits {
        for e in &f.long_run.effects {
            if !terms.contains(&e.term) {
                terms.push(e.term);
            }
        }
    }
    terms
}

pub fn long_run_csv(fits: &[IndexFit]) -> Vec<u8> {
    csv_bytes(
        &LONG_RUN_HEADER,
        fits.iter().flat_map(|f| {
            f.long_run.effects.iter().map(move |e| {
                let term = match e.term {
                    LongRunTerm::Regressor(Var::Cb) => "cb".to_string(),
                    t => t.label(f.index.code()),
                };
                vec![f.index.code().into(), term, fmt_num(e.value), fmt_num(e.se), fmt_num(e.p_value), e.stars().into()]
            })
        }),
    )
}

pub fn long_run_text(fits: &[IndexFit]) -> String {
    let terms = long_run_terms(fits);
    let labels: Vec<String> = terms
        .iter()
        .map(|t| match t {
            LongRunTerm::Regressor(Var::Cb) => "CB".to_string(),
            LongRunTerm::Regressor(Var::Pop) => "POP".to_string(),
            LongRunTerm::Regressor(Var::Rgni) => "RGNI".to_string(),
            LongRunTerm::Regressor(Var::Un) => "UN".to_string(),
            other => other.label(""),
        })
        .collect();
    let header: Vec<&str> = std::iter::once("Index in model").chain(labels.iter().map(String::as_str)).collect();
    let rows: Vec<Vec<String>> = fits
        .iter()
        .map(|f| {
            std::iter::once(f.index.label().to_string())
                .chain(terms.iter().map(|t| match f.long_run.get(*t) {
                    Some(e) => {
                        let d = if matches!(t, LongRunTerm::Trend(g) if *g >= 2) { 5 } else { 3 };
                        format!("{}{}", fixed(e.value, d), e.stars())
                    }
                    None => String::new(),
                }))
                .collect()
        })
        .collect();
    render(
        "Long-run elasticities; trend and dummy effects",
        &header,
        &rows,
        &[STAR_NOTE.into(), "significance from delta-method standard errors on the reported covariance".into()],
    )
}

pub fn effects_csv(rows: &[EffectRow]) -> Vec<u8> {
    csv_bytes(
        &["country", "best_value", "best_season", "worst_value", "worst_season", "attendance_avg", "effect_pct", "fans_per_game"],
        rows.iter().map(|r| {
            vec![
                r.country.clone(),
                fmt_num(r.best),
                r.best_season.to_string(),
                fmt_num(r.worst),
                r.worst_season.to_string(),
                fmt_num(r.average_attendance),
                fmt_num(100.0 * r.effect.relative),
                fmt_num(r.effect.fans_per_game),
            ]
        }),
    )
}

pub fn effects_text(index: IndexName, elasticity: f64, rows: &[EffectRow]) -> String {
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.country.clone(),
                fixed(r.best, 3),
                r.best_season.to_string(),
                fixed(r.worst, 3),
                r.worst_season.to_string(),
                fixed(r.average_attendance, 0),
                format!("{}%", fixed(100.0 * r.effect.relative, 1)),
                fixed(r.effect.fans_per_game, 0),
            ]
        })
        .collect();
    render(
        &format!("Effect of {} on attendance per country (elasticity {})", index.label(), fixed(elasticity, 3)),
        &["Country", "Best", "Season", "Worst", "Season", "Average", "Effect", "Fans/game"],
        &table,
        &["Effect: attendance gain from the worst to the best season; fans per league game".into()],
    )
}
