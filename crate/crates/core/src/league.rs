//! Final league tables and the three-level (title / Europe / relegation)
//! structure attached to them.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TeamSeasonRecord {
    pub team: String,
    pub rank: u32,
    pub wins: u32,
    pub draws: u32,
    pub losses: u32,
    /// Official points; informational only, never used for ranking.
    pub points: u32,
}

impl TeamSeasonRecord {
    pub fn games(&self) -> u32 {
        self.wins + self.draws + self.losses
    }

    /// Win-points under the 2-1-0 scheme.
    pub fn win_points(&self) -> u32 {
        2 * self.wins + self.draws
    }
}

/// Number of European-qualification places (K) and relegation places (I).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Levels {
    #[serde(rename = "K")]
    pub top: usize,
    #[serde(rename = "I")]
    pub relegation: usize,
}

impl Default for Levels {
    fn default() -> Self {
        Levels {
            top: 3,
            relegation: 3,
        }
    }
}

impl Levels {
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.top < 1 || self.relegation < 1 || self.top + self.relegation >= n {
            return Err(Error::OutOfRange {
                what: "K + I",
                value: (self.top + self.relegation) as f64,
                detail: format!(
                    "need K >= 1, I >= 1 and K + I < n = {n}; got K = {}, I = {}",
                    self.top, self.relegation
                ),
            });
        }
        Ok(())
    }
}

/// One `{country, from, to, K, I}` override.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelRule {
    pub country: String,
    pub from: i32,
    pub to: i32,
    #[serde(rename = "K")]
    pub top: usize,
    #[serde(rename = "I")]
    pub relegation: usize,
}

/// K/I lookup: the last matching rule wins, otherwise the default.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LevelTable {
    pub default: Levels,
    pub rules: Vec<LevelRule>,
}

impl LevelTable {
    pub fn levels_for(&self, country: &str, season: i32) -> Levels {
        self.rules
            .iter()
            .rev()
            .find(|r| r.country == country && r.from <= season && season <= r.to)
            .map(|r| Levels {
                top: r.top,
                relegation: r.relegation,
            })
            .unwrap_or(self.default)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeagueSeason {
    pub country: String,
    pub season: i32,
    records: Vec<TeamSeasonRecord>,
    pub levels: Levels,
    /// Teams absent from the previous season's table of the same country.
    pub promoted: BTreeSet<String>,
}

impl LeagueSeason {
    /// Validates ranks, games played and the level structure. Records are
    /// stored sorted by rank.
    pub fn new(
        country: impl Into<String>,
        season: i32,
        mut records: Vec<TeamSeasonRecord>,
        levels: Levels,
    ) -> Result<Self> {
        let country = country.into();
        let n = records.len();
        if n < 2 {
            return Err(Error::Degenerate(format!(
                "{country} {season} has {n} team(s); a league needs at least 2"
            )));
        }
        let mut seen = BTreeSet::new();
        for r in &records {
            if !seen.insert(r.rank) {
                return Err(Error::DuplicateRank {
                    country,
                    season,
                    rank: r.rank,
                });
            }
        }
        if seen.iter().next() != Some(&1) || seen.iter().next_back() != Some(&(n as u32)) {
            return Err(Error::RankPermutation { country, season, n });
        }
        let mut teams = BTreeSet::new();
        for r in &records {
            if !teams.insert(r.team.as_str()) {
                return Err(Error::Schema(format!(
                    "team {} listed twice in {country} {season}",
                    r.team
                )));
            }
        }
        let expected = records[0].games();
        if let Some(bad) = records.iter().find(|r| r.games() != expected) {
            return Err(Error::GamesPlayed {
                country,
                season,
                team: bad.team.clone(),
                expected,
                found: bad.games(),
            });
        }
        levels.validate(n)?;
        records.sort_by_key(|r| r.rank);
        Ok(LeagueSeason {
            country,
            season,
            records,
            levels,
            promoted: BTreeSet::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.records.len()
    }

    /// Records ordered by rank (index 0 is the champion).
    pub fn records(&self) -> &[TeamSeasonRecord] {
        &self.records
    }

    pub fn games(&self) -> u32 {
        self.records[0].games()
    }

    pub fn rank_of(&self, team: &str) -> Option<usize> {
        self.records
            .iter()
            .find(|r| r.team == team)
            .map(|r| r.rank as usize)
    }

    pub fn roster(&self) -> impl Iterator<Item = &str> {
        self.records.iter().map(|r| r.team.as_str())
    }

    /// Records the teams not present in `previous`.
    pub fn set_promoted_from(&mut self, previous: &LeagueSeason) {
        let before: BTreeSet<&str> = previous.roster().collect();
        self.promoted = self
            .roster()
            .filter(|t| !before.contains(t))
            .map(ToString::to_string)
            .collect();
    }

    /// Winning percentages by rank, `w = (2W + D) / (2G)`.
    pub fn winning_percentages(&self) -> Result<Vec<f64>> {
        winning_percentages(self)
    }

    /// True when every match of the season is accounted for, i.e. the
    /// win-points add up to `n (n - 1)` per round robin played.
    pub fn is_complete_schedule(&self) -> bool {
        let n = self.n() as u64;
        let g = self.games() as u64;
        if g == 0 || !g.is_multiple_of(n - 1) {
            return false;
        }
        let total: u64 = self.records.iter().map(|r| r.win_points() as u64).sum();
        total == n * g
    }
}

pub fn winning_percentages(season: &LeagueSeason) -> Result<Vec<f64>> {
    let g = season.games();
    if g == 0 {
        return Err(Error::Degenerate(format!(
            "{} {}: no games played",
            season.country, season.season
        )));
    }
    let denom = 2.0 * g as f64;
    Ok(season
        .records
        .iter()
        .map(|r| r.win_points() as f64 / denom)
        .collect())
}

/// Groups seasons by country (sorted by season) and fills the promoted sets
/// from consecutive rosters. The first season of each country, and any
/// season following a gap, gets an empty set.
pub fn link_seasons(seasons: Vec<LeagueSeason>) -> BTreeMap<String, Vec<LeagueSeason>> {
    let mut by_country: BTreeMap<String, Vec<LeagueSeason>> = BTreeMap::new();
    for s in seasons {
        by_country.entry(s.country.clone()).or_default().push(s);
    }
    for list in by_country.values_mut() {
        list.sort_by_key(|s| s.season);
        for i in 1..list.len() {
            let (head, tail) = list.split_at_mut(i);
            let prev = &head[i - 1];
            let curr = &mut tail[0];
            if curr.season == prev.season + 1 {
                curr.set_promoted_from(prev);
            }
        }
    }
    by_country
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use alloc::vec;

    fn one_one() -> Levels {
        Levels {
            top: 1,
            relegation: 1,
        }
    }

    #[test]
    fn four_team_season() {
        let s = LeagueSeason::new("X", 2000, cu_records(4, "t"), one_one()).unwrap();
        assert_eq!(s.n(), 4);
        let w = s.winning_percentages().unwrap();
        assert_eq!(w, vec![1.0, 2.0 / 3.0, 1.0 / 3.0, 0.0]);
        assert!(s.is_complete_schedule());
    }

    #[test]
    fn all_draws_give_half() {
        let s = LeagueSeason::new("X", 2000, all_draw_records(5, "t"), one_one()).unwrap();
        assert!(s.winning_percentages().unwrap().iter().all(|&w| w == 0.5));
    }

    #[test]
    fn mixed_record() {
        let mut recs = all_draw_records(4, "t");
        recs[0] = record("t1", 1, 10, 5, 15);
        for r in recs.iter_mut().skip(1) {
            *r = record(&r.team.clone(), r.rank, 0, 30, 0);
        }
        let s = LeagueSeason::new("X", 2000, recs, one_one()).unwrap();
        let w = s.winning_percentages().unwrap();
        assert!((w[0] - 25.0 / 60.0).abs() < 1e-15);
    }

    #[test]
    fn duplicate_rank_rejected() {
        let mut recs = cu_records(4, "t");
        recs[3].rank = 3;
        let err = LeagueSeason::new("X", 2000, recs, one_one()).unwrap_err();
        assert!(matches!(err, Error::DuplicateRank { rank: 3, .. }));
        assert!(alloc::format!("{err}").contains("duplicate rank"));
    }

    #[test]
    fn rank_gap_rejected() {
        let mut recs = cu_records(4, "t");
        recs[3].rank = 7;
        let err = LeagueSeason::new("X", 2000, recs, one_one()).unwrap_err();
        assert!(matches!(err, Error::RankPermutation { .. }));
    }

    #[test]
    fn inconsistent_games_rejected() {
        let mut recs = cu_records(4, "t");
        recs[2].losses += 1;
        let err = LeagueSeason::new("X", 2000, recs, one_one()).unwrap_err();
        assert!(matches!(err, Error::GamesPlayed { .. }));
    }

    #[test]
    fn zero_games_is_degenerate() {
        let recs = (1..=4).map(|i| record(&alloc::format!("t{i}"), i, 0, 0, 0)).collect();
        let s = LeagueSeason::new("X", 2000, recs, one_one()).unwrap();
        assert!(matches!(s.winning_percentages(), Err(Error::Degenerate(_))));
    }

    #[test]
    fn levels_must_leave_a_middle() {
        let err = LeagueSeason::new("X", 2000, cu_records(4, "t"), Levels::default()).unwrap_err();
        assert!(matches!(err, Error::OutOfRange { .. }));
    }

    #[test]
    fn promotions_are_roster_differences() {
        let a = LeagueSeason::new("X", 2000, cu_records(4, "t"), one_one()).unwrap();
        let mut recs = cu_records(4, "t");
        recs[3].team = "new".into();
        let b = LeagueSeason::new("X", 2001, recs, one_one()).unwrap();
        let linked = link_seasons(vec![b, a]);
        let list = &linked["X"];
        assert!(list[0].promoted.is_empty());
        assert_eq!(list[1].promoted.iter().collect::<Vec<_>>(), vec!["new"]);
    }

    #[test]
    fn level_rules_override_default() {
        let table = LevelTable {
            default: Levels::default(),
            rules: vec![LevelRule {
                country: "GRE".into(),
                from: 1990,
                to: 2000,
                top: 2,
                relegation: 4,
            }],
        };
        assert_eq!(table.levels_for("GRE", 1995).top, 2);
        assert_eq!(table.levels_for("GRE", 2001), Levels::default());
        assert_eq!(table.levels_for("ENG", 1995), Levels::default());
    }
}
