//! Country x season panel of log attendance and log macro covariates.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::league::LeagueSeason;

/// Last season before the post-Bosman / Champions League dummy switches on.
pub const D97_LAST_UNTREATED: i32 = 1997;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MacroObservation {
    pub country: String,
    pub season: i32,
    /// Average attendance per league game.
    pub attendance_per_game: f64,
    pub population: f64,
    /// Real per-capita disposable income.
    pub rgni: f64,
    /// Unemployment rate in percent.
    pub unemployment: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PanelRow {
    pub country: String,
    pub season: i32,
    pub ln_att: f64,
    pub ln_pop: f64,
    pub ln_rgni: f64,
    pub ln_un: f64,
    pub d97: f64,
    pub trend: i32,
}

impl PanelRow {
    pub fn trend_sq(&self) -> f64 {
        let t = self.trend as f64;
        t * t
    }

    pub fn trend_power(&self, g: usize) -> f64 {
        libm::pow(self.trend as f64, g as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PanelConfig {
    pub trend_degree: usize,
}

impl Default for PanelConfig {
    fn default() -> Self {
        PanelConfig { trend_degree: 2 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PanelDataset {
    rows: Vec<PanelRow>,
    spans: BTreeMap<String, Range<usize>>,
    /// Calendar season mapped to t = 1.
    pub origin: i32,
    pub trend_degree: usize,
}

impl PanelDataset {
    pub fn rows(&self) -> &[PanelRow] {
        &self.rows
    }

    pub fn countries(&self) -> impl Iterator<Item = &str> {
        self.spans.keys().map(String::as_str)
    }

    pub fn country_rows(&self, country: &str) -> &[PanelRow] {
        self.spans
            .get(country)
            .map(|r| &self.rows[r.clone()])
            .unwrap_or(&[])
    }

    pub fn season_counts(&self) -> Vec<(String, usize)> {
        self.spans.iter().map(|(c, r)| (c.clone(), r.len())).collect()
    }

    pub fn get(&self, country: &str, season: i32) -> Option<&PanelRow> {
        self.country_rows(country).iter().find(|r| r.season == season)
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

fn checked_ln(obs: &MacroObservation, variable: &str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(libm::log(value))
    } else {
        Err(Error::LogDomain {
            country: obs.country.clone(),
            season: obs.season,
            variable: variable.to_string(),
            value,
        })
    }
}

/// Builds the unbalanced panel. When `leagues` is non-empty every macro
/// row must have a matching league table.
pub fn build_panel(
    leagues: &[LeagueSeason],
    observations: &[MacroObservation],
    config: &PanelConfig,
) -> Result<PanelDataset> {
    if observations.is_empty() {
        return Err(Error::Degenerate("empty panel".into()));
    }
    let league_keys: BTreeSet<(&str, i32)> =
        leagues.iter().map(|l| (l.country.as_str(), l.season)).collect();

    let mut sorted: Vec<&MacroObservation> = observations.iter().collect();
    sorted.sort_by(|a, b| a.country.cmp(&b.country).then(a.season.cmp(&b.season)));
    let origin = sorted.iter().map(|o| o.season).min().unwrap_or(0) - 1;

    let mut rows = Vec::with_capacity(sorted.len());
    let mut spans = BTreeMap::new();
    let mut start = 0;
    for (i, obs) in sorted.iter().enumerate() {
        if !leagues.is_empty() && !league_keys.contains(&(obs.country.as_str(), obs.season)) {
            return Err(Error::Alignment(format!(
                "no league table for {} {}",
                obs.country, obs.season
            )));
        }
        if i > 0 && sorted[i - 1].country == obs.country {
            let expected = sorted[i - 1].season + 1;
            if obs.season != expected {
                if obs.season == sorted[i - 1].season {
                    return Err(Error::Schema(format!(
                        "duplicate macro row for {} {}",
                        obs.country, obs.season
                    )));
                }
                return Err(Error::SeasonGap {
                    country: obs.country.clone(),
                    expected,
                    found: obs.season,
                });
            }
        }
        rows.push(PanelRow {
            country: obs.country.clone(),
            season: obs.season,
            ln_att: checked_ln(obs, "attendance", obs.attendance_per_game)?,
            ln_pop: checked_ln(obs, "population", obs.population)?,
            ln_rgni: checked_ln(obs, "rgni", obs.rgni)?,
            ln_un: checked_ln(obs, "unemployment", obs.unemployment)?,
            d97: if obs.season > D97_LAST_UNTREATED { 1.0 } else { 0.0 },
            trend: obs.season - origin,
        });
        let last_of_country = sorted.get(i + 1).is_none_or(|n| n.country != obs.country);
        if last_of_country {
            spans.insert(obs.country.clone(), start..i + 1);
            start = i + 1;
        }
    }
    Ok(PanelDataset {
        rows,
        spans,
        origin,
        trend_degree: config.trend_degree,
    })
}

/// Average attendance per game over each country's sample.
pub fn average_attendance(observations: &[MacroObservation]) -> BTreeMap<String, f64> {
    let mut acc: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    for o in observations {
        let e = acc.entry(o.country.clone()).or_insert((0.0, 0));
        e.0 += o.attendance_per_game;
        e.1 += 1;
    }
    acc.into_iter().map(|(c, (s, n))| (c, s / n as f64)).collect()
}
