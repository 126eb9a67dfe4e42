//! Double round-robin seasons from a Bradley-Terry strength model.
//!
//! Each game is drawn with probability `exp(-dispersion)`; otherwise the
//! home side wins with probability `1 / (1 + exp(-dispersion (s_h - s_a)))`.
//! Dispersion 0 gives all draws, infinite dispersion lets the stronger
//! team win every game.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::league::{link_seasons, LeagueSeason, Levels, TeamSeasonRecord};
use crate::replicate::{replication_rng, tag};

#[derive(Debug, Clone, PartialEq)]
pub struct LeagueParams {
    pub country: String,
    pub teams: usize,
    pub seasons: usize,
    pub first_season: i32,
    /// 0 = every game drawn; `f64::INFINITY` = stronger team always wins.
    pub dispersion: f64,
    /// Bottom teams replaced by newcomers after every season.
    pub relegated: usize,
    pub levels: Levels,
    pub seed: u64,
}

impl LeagueParams {
    pub fn new(country: impl Into<String>, teams: usize, seasons: usize) -> Self {
        LeagueParams {
            country: country.into(),
            teams,
            seasons,
            first_season: 2000,
            dispersion: 1.0,
            relegated: 0,
            levels: Levels::default(),
            seed: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.teams < 2 {
            return Err(Error::InvalidParameter("a league needs at least 2 teams".into()));
        }
        if self.seasons == 0 {
            return Err(Error::InvalidParameter("at least one season is needed".into()));
        }
        if !(self.dispersion >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "dispersion must be non-negative, got {}",
                self.dispersion
            )));
        }
        if self.relegated >= self.teams {
            return Err(Error::InvalidParameter("cannot relegate the whole league".into()));
        }
        self.levels.validate(self.teams)
    }
}

#[derive(Debug, Clone)]
struct Team {
    name: String,
    strength: f64,
}

#[derive(Default, Clone, Copy)]
struct Tally {
    wins: u32,
    draws: u32,
    losses: u32,
}

fn play(home: &Team, away: &Team, dispersion: f64, rng: &mut impl Rng) -> Option<bool> {
    let p_draw = libm::exp(-dispersion);
    if p_draw >= 1.0 || (p_draw > 0.0 && rng.random::<f64>() < p_draw) {
        return None;
    }
    let diff = home.strength - away.strength;
    if dispersion.is_infinite() {
        return Some(diff > 0.0);
    }
    let p_home = 1.0 / (1.0 + libm::exp(-dispersion * diff));
    Some(rng.random::<f64>() < p_home)
}

/// A linked run of seasons (promoted sets filled in).
pub fn simulate_league(params: &LeagueParams) -> Result<Vec<LeagueSeason>> {
    params.validate()?;
    let domain = tag(&format!("league/{}", params.country));
    let mut setup = replication_rng(params.seed, domain, u64::MAX);
    let mut next_id = 0usize;
    let mut new_team = |rng: &mut rand_chacha::ChaCha8Rng| {
        next_id += 1;
        Team {
            name: format!("{}-{next_id:03}", params.country),
            strength: rng.sample(StandardNormal),
        }
    };
    let mut teams: Vec<Team> = (0..params.teams).map(|_| new_team(&mut setup)).collect();
    let mut out = Vec::with_capacity(params.seasons);
    for s in 0..params.seasons {
        let mut rng = replication_rng(params.seed, domain, s as u64);
        let n = teams.len();
        let mut tally = alloc::vec![Tally::default(); n];
        for h in 0..n {
            for a in 0..n {
                if h == a {
                    continue;
                }
                match play(&teams[h], &teams[a], params.dispersion, &mut rng) {
                    None => {
                        tally[h].draws += 1;
                        tally[a].draws += 1;
                    }
                    Some(true) => {
                        tally[h].wins += 1;
                        tally[a].losses += 1;
                    }
                    Some(false) => {
                        tally[a].wins += 1;
                        tally[h].losses += 1;
                    }
                }
            }
        }
        // rank by 3-1-0 points, then wins, then name
        let mut order: Vec<usize> = (0..n).collect();
        let pts = |t: &Tally| 3 * t.wins + t.draws;
        order.sort_by(|&x, &y| {
            pts(&tally[y])
                .cmp(&pts(&tally[x]))
                .then(tally[y].wins.cmp(&tally[x].wins))
                .then(teams[x].name.cmp(&teams[y].name))
        });
        let records = order
            .iter()
            .enumerate()
            .map(|(r, &i)| TeamSeasonRecord {
                team: teams[i].name.clone(),
                rank: r as u32 + 1,
                wins: tally[i].wins,
                draws: tally[i].draws,
                losses: tally[i].losses,
                points: pts(&tally[i]),
            })
            .collect();
        let season = params.first_season + s as i32;
        out.push(LeagueSeason::new(params.country.clone(), season, records, params.levels)?);
        if params.relegated > 0 {
            let keep: Vec<Team> = order[..n - params.relegated].iter().map(|&i| teams[i].clone()).collect();
            teams = keep;
            for _ in 0..params.relegated {
                teams.push(new_team(&mut rng));
            }
        }
    }
    let linked = link_seasons(out);
    Ok(linked.into_values().next().unwrap_or_default())
}
