//! CSV formats for league tables, covariates, index values and the
//! cached unit-root quantile table.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::Deserialize;
use uoh_core::econometrics::adf::{AdfTable, Deterministic};
use uoh_core::indices::{GDiagnostic, IndexName, IndexValue};
use uoh_core::league::{link_seasons, LeagueSeason, LevelTable, TeamSeasonRecord};
use uoh_core::panel::MacroObservation;

use crate::config::Config;
use crate::error::{Error, Result};

pub const LEAGUE_HEADER: [&str; 8] = ["country", "season", "team", "rank", "wins", "draws", "losses", "points"];
pub const MACRO_HEADER: [&str; 6] = ["country", "season", "attendance_avg", "population", "rgni_real", "unemployment_rate"];
pub const INDEX_HEADER: [&str; 4] = ["country", "season", "index", "value"];
pub const G_HEADER: [&str; 7] = ["country", "season", "mc_reps", "seed", "A", "E_hat", "mc_se"];
pub const ADF_HEADER: [&str; 4] = ["case", "T", "quantile", "value"];

/// Number with 12 significant digits, shortest round-trip form.
pub fn fmt_num(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "NaN".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if rounded == 0.0 {
        return "0".into();
    }
    format!("{rounded}")
}

fn open(path: &Path, header: &[&str]) -> Result<csv::Reader<std::fs::File>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let found = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    let found: Vec<&str> = found.iter().collect();
    if found != header {
        return Err(Error::File {
            path: path.into(),
            message: format!("expected header `{}`, found `{}`", header.join(","), found.join(",")),
        });
    }
    Ok(reader)
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::Row {
        path: path.into(),
        line,
        message: match e.kind() {
            csv::ErrorKind::Deserialize { err, .. } => err.to_string(),
            _ => e.to_string(),
        },
    }
}

fn rows<T: for<'de> Deserialize<'de>>(path: &Path, header: &[&str]) -> Result<Vec<(u64, T)>> {
    let mut reader = open(path, header)?;
    let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    let mut record = csv::StringRecord::new();
    let mut out = Vec::new();
    while reader.read_record(&mut record).map_err(|e| csv_error(path, e))? {
        let line = record.position().map_or(0, |p| p.line());
        let value = record.deserialize(Some(&headers)).map_err(|e| match csv_error(path, e) {
            Error::Row { path, message, .. } => Error::Row { path, line, message },
            other => other,
        })?;
        out.push((line, value));
    }
    Ok(out)
}

#[derive(Debug, Deserialize)]
struct LeagueRow {
    country: String,
    season: i32,
    team: String,
    rank: u32,
    wins: u32,
    draws: u32,
    losses: u32,
    points: u32,
}

/// League tables grouped by country, seasons in order, promoted sets
/// filled in. K and I come from `config`.
pub fn read_league_csv(path: &Path, config: &Config) -> Result<BTreeMap<String, Vec<LeagueSeason>>> {
    let levels: LevelTable = config.level_table();
    let mut groups: BTreeMap<(String, i32), Vec<TeamSeasonRecord>> = BTreeMap::new();
    let mut ranks: BTreeMap<(String, i32), BTreeSet<u32>> = BTreeMap::new();
    for (line, r) in rows::<LeagueRow>(path, &LEAGUE_HEADER)? {
        let row_err = |message: String| Error::Row { path: path.into(), line, message };
        if !config.includes(&r.country) {
            return Err(row_err(format!("unknown country {}", r.country)));
        }
        if r.team.is_empty() {
            return Err(row_err("empty team name".into()));
        }
        let key = (r.country.clone(), r.season);
        if !ranks.entry(key.clone()).or_default().insert(r.rank) {
            return Err(row_err(format!("duplicate rank {} in {} {}", r.rank, r.country, r.season)));
        }
        groups.entry(key).or_default().push(TeamSeasonRecord {
            team: r.team,
            rank: r.rank,
            wins: r.wins,
            draws: r.draws,
            losses: r.losses,
            points: r.points,
        });
    }
    if groups.is_empty() {
        return Err(Error::File { path: path.into(), message: "no league rows".into() });
    }
    let mut seasons = Vec::with_capacity(groups.len());
    for ((country, season), records) in groups {
        let l = levels.levels_for(&country, season);
        seasons.push(LeagueSeason::new(country, season, records, l)?);
    }
    Ok(link_seasons(seasons))
}

#[derive(Debug, Deserialize)]
struct MacroRow {
    country: String,
    season: i32,
    attendance_avg: f64,
    population: f64,
    rgni_real: f64,
    unemployment_rate: f64,
}

pub fn read_macro_csv(path: &Path, config: &Config) -> Result<Vec<MacroObservation>> {
    let mut out = Vec::new();
    for (line, r) in rows::<MacroRow>(path, &MACRO_HEADER)? {
        if !config.includes(&r.country) {
            return Err(Error::Row { path: path.into(), line, message: format!("unknown country {}", r.country) });
        }
        out.push(MacroObservation {
            country: r.country,
            season: r.season,
            attendance_per_game: r.attendance_avg,
            population: r.population,
            rgni: r.rgni_real,
            unemployment: r.unemployment_rate,
        });
    }
    if out.is_empty() {
        return Err(Error::File { path: path.into(), message: "no covariate rows".into() });
    }
    Ok(out)
}

#[derive(Debug, Deserialize)]
struct IndexRow {
    country: String,
    season: i32,
    index: String,
    value: f64,
}

pub fn read_index_csv(path: &Path, config: &Config) -> Result<Vec<IndexValue>> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for (line, r) in rows::<IndexRow>(path, &INDEX_HEADER)? {
        let row_err = |message: String| Error::Row { path: path.into(), line, message };
        let name: IndexName = r.index.parse().map_err(|e: uoh_core::Error| row_err(e.to_string()))?;
        if !config.includes(&r.country) {
            continue;
        }
        if !seen.insert((r.country.clone(), r.season, name)) {
            return Err(row_err(format!("duplicate {} value for {} {}", name.code(), r.country, r.season)));
        }
        out.push(IndexValue { name, country: r.country, season: r.season, value: r.value, flagged: false });
    }
    Ok(out)
}

fn to_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Generic CSV bytes with a header and string rows.
pub fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    to_bytes(header, rows)
}

pub fn index_csv(values: &[IndexValue]) -> Vec<u8> {
    to_bytes(
        &INDEX_HEADER,
        values.iter().map(|v| vec![v.country.clone(), v.season.to_string(), v.name.code().into(), fmt_num(v.value)]),
    )
}

pub fn g_diagnostics_csv(diag: &[GDiagnostic]) -> Vec<u8> {
    to_bytes(
        &G_HEADER,
        diag.iter().map(|g| {
            vec![
                g.country.clone(),
                g.season.to_string(),
                g.mc_reps.to_string(),
                g.seed.to_string(),
                g.observed.to_string(),
                fmt_num(g.e_hat),
                fmt_num(g.mc_se),
            ]
        }),
    )
}

pub fn league_csv(seasons: &[LeagueSeason]) -> Vec<u8> {
    to_bytes(
        &LEAGUE_HEADER,
        seasons.iter().flat_map(|s| {
            s.records().iter().map(move |r| {
                vec![
                    s.country.clone(),
                    s.season.to_string(),
                    r.team.clone(),
                    r.rank.to_string(),
                    r.wins.to_string(),
                    r.draws.to_string(),
                    r.losses.to_string(),
                    r.points.to_string(),
                ]
            })
        }),
    )
}

pub fn macro_csv(obs: &[MacroObservation]) -> Vec<u8> {
    to_bytes(
        &MACRO_HEADER,
        obs.iter().map(|o| {
            vec![
                o.country.clone(),
                o.season.to_string(),
                fmt_num(o.attendance_per_game),
                fmt_num(o.population),
                fmt_num(o.rgni),
                fmt_num(o.unemployment),
            ]
        }),
    )
}

/// Quantile table rows. Values keep full precision so a reloaded table
/// reproduces the simulated one exactly.
pub fn adf_table_csv(table: &AdfTable) -> Vec<u8> {
    to_bytes(
        &ADF_HEADER,
        table
            .to_rows()
            .into_iter()
            .map(|(d, t, p, q)| vec![d.code().into(), t.to_string(), format!("{p}"), format!("{q}")]),
    )
}

#[derive(Debug, Deserialize)]
struct AdfRow {
    case: String,
    #[serde(rename = "T")]
    t: usize,
    quantile: f64,
    value: f64,
}

pub fn read_adf_table(path: &Path) -> Result<AdfTable> {
    let mut out = Vec::new();
    for (line, r) in rows::<AdfRow>(path, &ADF_HEADER)? {
        let det = Deterministic::from_code(&r.case).ok_or_else(|| Error::Row {
            path: path.into(),
            line,
            message: format!("unknown case {}", r.case),
        })?;
        out.push((det, r.t, r.quantile, r.value));
    }
    Ok(AdfTable::from_rows(&out)?)
}

pub const LONG_RUN_HEADER: [&str; 6] = ["index", "term", "elasticity", "std_error", "p_value", "stars"];

#[derive(Debug, Deserialize)]
struct LongRunRow {
    index: String,
    term: String,
    elasticity: f64,
    #[allow(dead_code)]
    std_error: f64,
    #[allow(dead_code)]
    p_value: f64,
    #[allow(dead_code)]
    stars: String,
}

/// Long-run CB elasticity of `index` from a `long_run.csv` written by `fit`.
pub fn read_long_run_elasticity(path: &Path, index: IndexName) -> Result<f64> {
    rows::<LongRunRow>(path, &LONG_RUN_HEADER)?
        .into_iter()
        .find(|(_, r)| r.term == "cb" && r.index.parse::<IndexName>().is_ok_and(|n| n == index))
        .map(|(_, r)| r.elasticity)
        .ok_or_else(|| Error::File {
            path: path.into(),
            message: format!("no CB elasticity for {}", index.code()),
        })
}
