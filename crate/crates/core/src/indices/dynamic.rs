//! Between-seasons indices built from rank mobility, plus the top-K
//! turnover index G.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use super::seasonal::{check_levels, WeightScheme};
use crate::error::{Error, Result};
use crate::league::LeagueSeason;
use crate::replicate::{replication_rng, tag, Replicator};

/// Two consecutive seasons of the same league.
#[derive(Debug, Clone)]
pub struct SeasonPair<'a> {
    pub prev: &'a LeagueSeason,
    pub curr: &'a LeagueSeason,
    prev_rank: BTreeMap<&'a str, usize>,
}

impl<'a> SeasonPair<'a> {
    pub fn new(prev: &'a LeagueSeason, curr: &'a LeagueSeason) -> Result<Self> {
        if prev.country != curr.country {
            return Err(Error::Pairing(format!(
                "seasons from different countries ({} / {})",
                prev.country, curr.country
            )));
        }
        if curr.season != prev.season + 1 {
            return Err(Error::Pairing(format!(
                "{}: seasons {} and {} are not consecutive",
                curr.country, prev.season, curr.season
            )));
        }
        let prev_rank = prev
            .records()
            .iter()
            .map(|r| (r.team.as_str(), r.rank as usize))
            .collect();
        Ok(SeasonPair {
            prev,
            curr,
            prev_rank,
        })
    }

    /// Previous-season rank of `team`, `None` when it was not in the league.
    pub fn prev_rank(&self, team: &str) -> Option<usize> {
        self.prev_rank.get(team).copied()
    }

    fn team_at(&self, rank: usize) -> &str {
        &self.curr.records()[rank - 1].team
    }

    /// Rank persistence of the team currently at `rank`:
    /// 1 - min(|p - r|, n_prev - 1) / (n_prev - 1), and 0 for newcomers.
    pub fn persistence(&self, rank: usize) -> f64 {
        let span = (self.prev.n() - 1) as f64;
        match self.prev_rank(self.team_at(rank)) {
            None => 0.0,
            Some(p) => {
                let d = (p.abs_diff(rank) as f64).min(span);
                1.0 - d / span
            }
        }
    }
}

/// Kendall's tau-b with the usual tie corrections; O(n^2).
pub fn kendall_tau_b(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len();
    if n != y.len() || n < 2 {
        return Err(Error::InsufficientOverlap(format!(
            "tau needs two paired samples of length >= 2 (got {} / {})",
            n,
            y.len()
        )));
    }
    let (mut concordant, mut discordant, mut ties_x, mut ties_y) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let dx = x[i] - x[j];
            let dy = y[i] - y[j];
            if dx == 0.0 && dy == 0.0 {
                ties_x += 1;
                ties_y += 1;
            } else if dx == 0.0 {
                ties_x += 1;
            } else if dy == 0.0 {
                ties_y += 1;
            } else if (dx > 0.0) == (dy > 0.0) {
                concordant += 1;
            } else {
                discordant += 1;
            }
        }
    }
    let pairs = (n * (n - 1) / 2) as f64;
    let denom = libm::sqrt((pairs - ties_x as f64) * (pairs - ties_y as f64));
    if denom == 0.0 {
        return Err(Error::Degenerate("tau undefined: one ranking is constant".into()));
    }
    Ok((concordant - discordant) as f64 / denom)
}

/// Rescaled Kendall tau over teams present in both seasons, (1 + tau) / 2.
pub fn tau_rescaled(pair: &SeasonPair<'_>) -> Result<f64> {
    let mut prev = Vec::new();
    let mut curr = Vec::new();
    for r in pair.curr.records() {
        if let Some(p) = pair.prev_rank(&r.team) {
            prev.push(p as f64);
            curr.push(r.rank as f64);
        }
    }
    if prev.len() < 2 {
        return Err(Error::InsufficientOverlap(format!(
            "{} {}: {} team(s) in common with the previous season",
            pair.curr.country,
            pair.curr.season,
            prev.len()
        )));
    }
    let tau = kendall_tau_b(&prev, &curr)?;
    Ok((1.0 + tau) / 2.0)
}

/// Champion persistence: 1 - (p - 1)/(n_prev - 1), floored at 0, where p is
/// the champion's previous rank (n_prev + 1 for a promoted champion).
pub fn dn_champion(pair: &SeasonPair<'_>) -> Result<f64> {
    let n_prev = pair.prev.n();
    let p = pair.prev_rank(pair.team_at(1)).unwrap_or(n_prev + 1);
    if p == 1 {
        return Ok(1.0);
    }
    Ok((1.0 - (p - 1) as f64 / (n_prev - 1) as f64).max(0.0))
}

fn check_rank_count(what: &'static str, value: usize, n: usize) -> Result<()> {
    if value < 1 || value >= n {
        return Err(Error::OutOfRange {
            what,
            value: value as f64,
            detail: format!("need 1 <= {what} < n = {n}"),
        });
    }
    Ok(())
}

/// Weighted rank persistence over the top K, weights K+1-r.
pub fn adn_top(pair: &SeasonPair<'_>, k: usize) -> Result<f64> {
    check_rank_count("K", k, pair.curr.n())?;
    let mut num = 0.0;
    let mut den = 0.0;
    for r in 1..=k {
        let v = (k + 1 - r) as f64;
        num += v * pair.persistence(r);
        den += v;
    }
    Ok(num / den)
}

/// Mean rank persistence over the bottom I places.
pub fn dn_relegation(pair: &SeasonPair<'_>, i: usize) -> Result<f64> {
    let n = pair.curr.n();
    check_rank_count("I", i, n)?;
    let total: f64 = (n - i + 1..=n).map(|r| pair.persistence(r)).sum();
    Ok(total / i as f64)
}

/// Three-level persistence with the seasonal rank weights.
pub fn sdn(pair: &SeasonPair<'_>, k: usize, i: usize) -> Result<f64> {
    let n = pair.curr.n();
    check_levels(n, k, i)?;
    let scheme = WeightScheme::new(n, k, i)?;
    let mut num = 0.0;
    let mut den = 0.0;
    for r in (1..=k).chain(n - i + 1..=n) {
        num += scheme.weight(r) * pair.persistence(r);
        den += scheme.weight(r);
    }
    Ok(num / den)
}

/// T consecutive seasons of one league, reduced to what G needs: interned
/// rosters and the observed top-K sets.
#[derive(Debug, Clone)]
pub struct TopKWindow {
    pub country: String,
    pub first_season: i32,
    pub last_season: i32,
    pub k: usize,
    team_count: usize,
    rosters: Vec<Vec<u32>>,
    observed: BTreeSet<u32>,
}

impl TopKWindow {
    pub fn new(seasons: &[LeagueSeason], k: usize) -> Result<Self> {
        if seasons.len() < 2 {
            return Err(Error::OutOfRange {
                what: "T",
                value: seasons.len() as f64,
                detail: "a G window needs at least two seasons".into(),
            });
        }
        let country = seasons[0].country.clone();
        for w in seasons.windows(2) {
            if w[1].country != country || w[1].season != w[0].season + 1 {
                return Err(Error::Pairing(format!(
                    "G window for {country} is not a run of consecutive seasons"
                )));
            }
        }
        let min_n = seasons.iter().map(LeagueSeason::n).min().unwrap_or(0);
        check_rank_count("K", k, min_n)?;
        let mut ids: BTreeMap<&str, u32> = BTreeMap::new();
        let mut rosters = Vec::with_capacity(seasons.len());
        let mut observed = BTreeSet::new();
        for s in seasons {
            let mut roster = Vec::with_capacity(s.n());
            for (pos, team) in s.roster().enumerate() {
                let next = ids.len() as u32;
                let id = *ids.entry(team).or_insert(next);
                roster.push(id);
                if pos < k {
                    observed.insert(id);
                }
            }
            rosters.push(roster);
        }
        Ok(TopKWindow {
            country,
            first_season: seasons[0].season,
            last_season: seasons[seasons.len() - 1].season,
            k,
            team_count: ids.len(),
            rosters,
            observed,
        })
    }

    pub fn len(&self) -> usize {
        self.rosters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rosters.is_empty()
    }

    /// Distinct teams observed in the top K across the window (A).
    pub fn observed_distinct(&self) -> usize {
        self.observed.len()
    }

    /// Rosters as interned ids; exposed for independent checks.
    pub fn rosters(&self) -> &[Vec<u32>] {
        &self.rosters
    }

    /// One draw of the distinct-top-K count when every season's ranking is
    /// a uniform permutation of its roster.
    pub fn replicate<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let mut seen = alloc::vec![false; self.team_count];
        let mut distinct = 0;
        let mut scratch: Vec<u32> = Vec::new();
        for roster in &self.rosters {
            scratch.clear();
            scratch.extend_from_slice(roster);
            let (top, _) = scratch.partial_shuffle(rng, self.k);
            for &id in top.iter() {
                if !seen[id as usize] {
                    seen[id as usize] = true;
                    distinct += 1;
                }
            }
        }
        distinct
    }

    fn domain(&self) -> u64 {
        tag(&self.country) ^ ((self.last_season as u64) << 32) ^ self.len() as u64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GEstimate {
    pub value: f64,
    pub observed: usize,
    pub expected: f64,
    pub mc_se: f64,
    pub mc_reps: u64,
    pub seed: u64,
}

/// G = clamp((E - A) / (E - K)) with E the Monte Carlo expectation of the
/// distinct-top-K count under uniformly random rankings.
pub fn g_index<R: Replicator>(
    window: &TopKWindow,
    mc_reps: u64,
    seed: u64,
    replicator: &R,
) -> Result<GEstimate> {
    if mc_reps < 2 {
        return Err(Error::InvalidParameter("G needs at least 2 Monte Carlo replications".into()));
    }
    let domain = window.domain();
    let counts = replicator.map(mc_reps, |rep| {
        let mut rng = replication_rng(seed, domain, rep);
        window.replicate(&mut rng) as u64
    });
    // integer sums keep E independent of scheduling
    let sum: u64 = counts.iter().sum();
    let sum_sq: u128 = counts.iter().map(|&c| (c as u128) * (c as u128)).sum();
    let reps = mc_reps as f64;
    let expected = sum as f64 / reps;
    let var = (sum_sq as f64 - reps * expected * expected) / (reps - 1.0);
    let mc_se = libm::sqrt(var.max(0.0) / reps);
    let k = window.k as f64;
    if expected <= k {
        return Err(Error::Degenerate(format!(
            "G window {}..{} of {}: E = {expected} <= K",
            window.first_season, window.last_season, window.country
        )));
    }
    let observed = window.observed_distinct();
    let value = ((expected - observed as f64) / (expected - k)).clamp(0.0, 1.0);
    Ok(GEstimate {
        value,
        observed,
        expected,
        mc_se,
        mc_reps,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::league::fixtures::{cu_records, record};
    use crate::league::{Levels, TeamSeasonRecord};
    use crate::replicate::Sequential;
    use alloc::vec;

    fn season(season: i32, teams: &[&str]) -> LeagueSeason {
        let n = teams.len();
        let recs: Vec<TeamSeasonRecord> = teams
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let rank = i + 1;
                record(t, rank as u32, 2 * (n - rank) as u32, 0, 2 * (rank - 1) as u32)
            })
            .collect();
        LeagueSeason::new("X", season, recs, Levels { top: 1, relegation: 1 }).unwrap()
    }

    fn names(prefix: &str, n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("{prefix}{i}")).collect()
    }

    fn refs(v: &[String]) -> Vec<&str> {
        v.iter().map(String::as_str).collect()
    }

    #[test]
    fn tau_examples() {
        let a = season(2000, &["a", "b", "c", "d"]);
        let same = season(2001, &["a", "b", "c", "d"]);
        let rev = season(2001, &["d", "c", "b", "a"]);
        let swap = season(2001, &["b", "a", "c", "d"]);
        assert_eq!(tau_rescaled(&SeasonPair::new(&a, &same).unwrap()).unwrap(), 1.0);
        assert_eq!(tau_rescaled(&SeasonPair::new(&a, &rev).unwrap()).unwrap(), 0.0);
        let v = tau_rescaled(&SeasonPair::new(&a, &swap).unwrap()).unwrap();
        assert!((v - 5.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn tau_needs_overlap() {
        let a = season(2000, &["a", "b", "c"]);
        let b = season(2001, &["a", "y", "z"]);
        let err = tau_rescaled(&SeasonPair::new(&a, &b).unwrap()).unwrap_err();
        assert!(matches!(err, Error::InsufficientOverlap(_)));
    }

    #[test]
    fn tau_b_matches_inversion_count() {
        // untied permutation: tau = 1 - 4 * inversions / (n (n - 1))
        let x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let y = [3.0, 1.0, 2.0, 6.0, 4.0, 5.0];
        let mut inv = 0;
        for i in 0..6 {
            for j in i + 1..6 {
                if y[i] > y[j] {
                    inv += 1;
                }
            }
        }
        let expected = 1.0 - 4.0 * inv as f64 / 30.0;
        assert!((kendall_tau_b(&x, &y).unwrap() - expected).abs() < 1e-15);
        // ties: x has one tied pair
        let t = kendall_tau_b(&[1.0, 1.0, 2.0], &[1.0, 2.0, 3.0]).unwrap();
        assert!((t - 2.0 / libm::sqrt(2.0 * 3.0)).abs() < 1e-15);
    }

    #[test]
    fn champion_examples() {
        let t = names("t", 11);
        let prev = season(2000, &refs(&t));
        assert_eq!(dn_champion(&SeasonPair::new(&prev, &prev.clone_as(2001)).unwrap()).unwrap(), 1.0);
        let mut order = t.clone();
        order.swap(0, 2);
        let curr = season(2001, &refs(&order));
        let v = dn_champion(&SeasonPair::new(&prev, &curr).unwrap()).unwrap();
        assert!((v - 0.8).abs() < 1e-15);
        let mut promoted = t.clone();
        promoted[0] = "new".into();
        let curr = season(2001, &refs(&promoted));
        assert_eq!(dn_champion(&SeasonPair::new(&prev, &curr).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn adn_examples() {
        let t = names("t", 11);
        let prev = season(2000, &refs(&t));
        // runner-up was sixth
        let mut order = t.clone();
        let sixth = order.remove(5);
        order.insert(1, sixth);
        let curr = season(2001, &refs(&order));
        let v = adn_top(&SeasonPair::new(&prev, &curr).unwrap(), 2).unwrap();
        assert!((v - 2.6 / 3.0).abs() < 1e-15);
        let mut fresh = t.clone();
        fresh[0] = "n1".into();
        fresh[1] = "n2".into();
        let curr = season(2001, &refs(&fresh));
        assert_eq!(adn_top(&SeasonPair::new(&prev, &curr).unwrap(), 2).unwrap(), 0.0);
        assert_eq!(adn_top(&SeasonPair::new(&prev, &prev.clone_as(2001)).unwrap(), 3).unwrap(), 1.0);
    }

    #[test]
    fn relegation_examples() {
        let t = names("t", 11);
        let prev = season(2000, &refs(&t));
        // the team ranked 10 now was fifth before; rank 11 unchanged
        let mut order = t.clone();
        let fifth = order.remove(4);
        order.insert(9, fifth);
        let curr = season(2001, &refs(&order));
        let v = dn_relegation(&SeasonPair::new(&prev, &curr).unwrap(), 2).unwrap();
        assert!((v - 0.75).abs() < 1e-15);
    }

    #[test]
    fn sdn_example_uses_weight_scheme() {
        let t = names("t", 11);
        let prev = season(2000, &refs(&t));
        let mut order = t.clone();
        let sixth = order.remove(5);
        order.push(sixth);
        let curr = season(2001, &refs(&order));
        let pair = SeasonPair::new(&prev, &curr).unwrap();
        assert!((pair.persistence(11) - 0.5).abs() < 1e-15);
        // K = 1: champion weight K + 2 - 1 = 2, relegation weight 1
        let v = sdn(&pair, 1, 1).unwrap();
        assert!((v - 2.5 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn frozen_window_has_g_one() {
        let recs = cu_records(8, "t");
        let seasons: Vec<LeagueSeason> = (0..5)
            .map(|i| LeagueSeason::new("X", 2000 + i, recs.clone(), Levels::default()).unwrap())
            .collect();
        let w = TopKWindow::new(&seasons, 3).unwrap();
        let g = g_index(&w, 500, 1, &Sequential).unwrap();
        assert_eq!(g.observed, 3);
        assert_eq!(g.value, 1.0);
    }

    #[test]
    fn g_rejects_bad_windows() {
        let s = season(2000, &["a", "b", "c"]);
        assert!(TopKWindow::new(core::slice::from_ref(&s), 1).is_err());
        let gap = season(2002, &["a", "b", "c"]);
        assert!(TopKWindow::new(&[s.clone(), gap], 1).is_err());
        assert!(TopKWindow::new(&[s.clone(), s.clone_as(2001)], 3).is_err());
    }

    impl LeagueSeason {
        fn clone_as(&self, season: i32) -> LeagueSeason {
            let mut s = self.clone();
            s.season = season;
            s
        }
    }

    #[test]
    fn pairs_must_be_consecutive() {
        let a = season(2000, &["a", "b", "c"]);
        let c = season(2002, &["a", "b", "c"]);
        assert!(matches!(SeasonPair::new(&a, &c), Err(Error::Pairing(_))));
        let _ = vec![0];
    }
}
