//! The seventeen competitive-balance indices.

pub mod dynamic;
pub mod seasonal;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::league::LeagueSeason;
use crate::replicate::Replicator;

pub use dynamic::{
    adn_top, dn_champion, dn_relegation, g_index, kendall_tau_b, sdn, tau_rescaled, GEstimate,
    SeasonPair, TopKWindow,
};
pub use seasonal::{
    acr_top, adjusted_gini, hhi_star, namsi, ncr_champion, ncr_relegation, scr,
    ReferenceDistribution, WeightScheme,
};

/// Slack allowed past [0, 1] before a clamped value is flagged.
pub const CLAMP_SLACK: f64 = 1e-9;

/// An index value clamped into [0, 1], keeping the raw ratio for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Clamped {
    pub value: f64,
    pub raw: f64,
}

impl Clamped {
    pub fn new(raw: f64) -> Self {
        Clamped {
            value: raw.clamp(0.0, 1.0),
            raw,
        }
    }

    pub fn flagged(&self) -> bool {
        self.raw > 1.0 + CLAMP_SLACK || self.raw < -CLAMP_SLACK
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Seasonal,
    BetweenSeasons,
    Bidimensional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IndexName {
    Namsi,
    HhiStar,
    AdjustedGini,
    Ncr1,
    AcrK,
    NcrI,
    ScrKI,
    Tau,
    G,
    Dn1,
    AdnK,
    DnI,
    SdnKI,
    Dc1,
    AdcK,
    DcI,
    SdcKI,
}

impl IndexName {
    pub const ALL: [IndexName; 17] = [
        IndexName::Namsi,
        IndexName::HhiStar,
        IndexName::AdjustedGini,
        IndexName::Ncr1,
        IndexName::AcrK,
        IndexName::NcrI,
        IndexName::ScrKI,
        IndexName::Tau,
        IndexName::G,
        IndexName::Dn1,
        IndexName::AdnK,
        IndexName::DnI,
        IndexName::SdnKI,
        IndexName::Dc1,
        IndexName::AdcK,
        IndexName::DcI,
        IndexName::SdcKI,
    ];

    /// Machine identifier used in CSV files and column names.
    pub fn code(self) -> &'static str {
        match self {
            IndexName::Namsi => "namsi",
            IndexName::HhiStar => "hhi_star",
            IndexName::AdjustedGini => "agini",
            IndexName::Ncr1 => "ncr1",
            IndexName::AcrK => "acr_k",
            IndexName::NcrI => "ncr_i",
            IndexName::ScrKI => "scr_ki",
            IndexName::Tau => "tau",
            IndexName::G => "g",
            IndexName::Dn1 => "dn1",
            IndexName::AdnK => "adn_k",
            IndexName::DnI => "dn_i",
            IndexName::SdnKI => "sdn_ki",
            IndexName::Dc1 => "dc1",
            IndexName::AdcK => "adc_k",
            IndexName::DcI => "dc_i",
            IndexName::SdcKI => "sdc_ki",
        }
    }

    /// Display label for reports.
    pub fn label(self) -> &'static str {
        match self {
            IndexName::Namsi => "NAMSI",
            IndexName::HhiStar => "HHI*",
            IndexName::AdjustedGini => "AGINI",
            IndexName::Ncr1 => "NCR_1",
            IndexName::AcrK => "ACR_K",
            IndexName::NcrI => "NCR^I",
            IndexName::ScrKI => "SCR_K^I",
            IndexName::Tau => "tau",
            IndexName::G => "G",
            IndexName::Dn1 => "DN_1",
            IndexName::AdnK => "ADN_K",
            IndexName::DnI => "DN^I",
            IndexName::SdnKI => "SDN_K^I",
            IndexName::Dc1 => "DC_1",
            IndexName::AdcK => "ADC_K",
            IndexName::DcI => "DC^I",
            IndexName::SdcKI => "SDC_K^I",
        }
    }

    pub fn family(self) -> Family {
        use IndexName::*;
        match self {
            Namsi | HhiStar | AdjustedGini | Ncr1 | AcrK | NcrI | ScrKI => Family::Seasonal,
            Tau | G | Dn1 | AdnK | DnI | SdnKI => Family::BetweenSeasons,
            Dc1 | AdcK | DcI | SdcKI => Family::Bidimensional,
        }
    }

    /// (seasonal, dynamic) components of a bi-dimensional index.
    pub fn components(self) -> Option<(IndexName, IndexName)> {
        use IndexName::*;
        match self {
            Dc1 => Some((Ncr1, Dn1)),
            AdcK => Some((AcrK, AdnK)),
            DcI => Some((NcrI, DnI)),
            SdcKI => Some((ScrKI, SdnKI)),
            _ => None,
        }
    }

    fn combined(seasonal: IndexName, dynamic: IndexName) -> Option<IndexName> {
        [IndexName::Dc1, IndexName::AdcK, IndexName::DcI, IndexName::SdcKI]
            .into_iter()
            .find(|b| b.components() == Some((seasonal, dynamic)))
    }
}

impl fmt::Display for IndexName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for IndexName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        IndexName::ALL
            .into_iter()
            .find(|n| n.code() == lower || n.label().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Schema(format!("unknown index name '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexValue {
    pub name: IndexName,
    pub country: String,
    pub season: i32,
    pub value: f64,
    /// Raw ratio fell outside [0, 1] and was clamped.
    pub flagged: bool,
}

/// Arithmetic mean of a seasonal index and its between-seasons counterpart.
pub fn combine_bidimensional(seasonal: &IndexValue, dynamic: &IndexValue) -> Result<IndexValue> {
    let name = IndexName::combined(seasonal.name, dynamic.name).ok_or_else(|| {
        Error::Pairing(format!("{} and {} do not form a bi-dimensional index", seasonal.name, dynamic.name))
    })?;
    if seasonal.country != dynamic.country || seasonal.season != dynamic.season {
        return Err(Error::Pairing(format!(
            "{} {} {} paired with {} {} {}",
            seasonal.name, seasonal.country, seasonal.season, dynamic.name, dynamic.country, dynamic.season
        )));
    }
    Ok(IndexValue {
        name,
        country: seasonal.country.clone(),
        season: seasonal.season,
        value: (seasonal.value + dynamic.value) / 2.0,
        flagged: seasonal.flagged || dynamic.flagged,
    })
}

/// One index over (country, season).
#[derive(Debug, Clone, PartialEq)]
pub struct IndexSeries {
    pub name: IndexName,
    pub values: BTreeMap<(String, i32), f64>,
}

impl IndexSeries {
    pub fn new(name: IndexName) -> Self {
        IndexSeries {
            name,
            values: BTreeMap::new(),
        }
    }

    pub fn from_values<'a>(name: IndexName, values: impl IntoIterator<Item = &'a IndexValue>) -> Self {
        let values = values
            .into_iter()
            .filter(|v| v.name == name)
            .map(|v| ((v.country.clone(), v.season), v.value))
            .collect();
        IndexSeries { name, values }
    }

    pub fn get(&self, country: &str, season: i32) -> Option<f64> {
        self.values.get(&(String::from(country), season)).copied()
    }

    /// Values of one country in season order.
    pub fn country(&self, country: &str) -> Vec<(i32, f64)> {
        self.values
            .iter()
            .filter(|((c, _), _)| c == country)
            .map(|((_, s), v)| (*s, *v))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexOptions {
    /// Seasons per G window.
    pub g_window: usize,
    pub mc_reps: u64,
    pub seed: u64,
}

impl Default for IndexOptions {
    fn default() -> Self {
        IndexOptions {
            g_window: 5,
            mc_reps: 10_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GDiagnostic {
    pub country: String,
    pub season: i32,
    pub mc_reps: u64,
    pub seed: u64,
    pub observed: usize,
    pub e_hat: f64,
    pub mc_se: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IndexTable {
    pub values: Vec<IndexValue>,
    pub g_diagnostics: Vec<GDiagnostic>,
    pub warnings: Vec<String>,
}

impl IndexTable {
    pub fn series(&self, name: IndexName) -> IndexSeries {
        IndexSeries::from_values(name, &self.values)
    }

    fn extend(&mut self, other: IndexTable) {
        self.values.extend(other.values);
        self.g_diagnostics.extend(other.g_diagnostics);
        self.warnings.extend(other.warnings);
    }
}

fn value(name: IndexName, s: &LeagueSeason, c: Clamped) -> IndexValue {
    IndexValue {
        name,
        country: s.country.clone(),
        season: s.season,
        value: c.value,
        flagged: c.flagged(),
    }
}

/// The seven seasonal indices of one season.
pub fn seasonal_indices(season: &LeagueSeason) -> Result<Vec<IndexValue>> {
    let w = season.winning_percentages()?;
    let (k, i) = (season.levels.top, season.levels.relegation);
    Ok(alloc::vec![
        value(IndexName::Namsi, season, namsi(&w)?),
        value(IndexName::HhiStar, season, hhi_star(&w)?),
        value(IndexName::AdjustedGini, season, adjusted_gini(&w)?),
        value(IndexName::Ncr1, season, ncr_champion(&w)?),
        value(IndexName::AcrK, season, acr_top(&w, k)?),
        value(IndexName::NcrI, season, ncr_relegation(&w, i)?),
        value(IndexName::ScrKI, season, scr(&w, k, i)?),
    ])
}

/// tau, DN_1, ADN_K, DN^I and SDN_K^I for a consecutive pair (G excluded).
pub fn pair_indices(pair: &SeasonPair<'_>) -> Result<Vec<IndexValue>> {
    let s = pair.curr;
    let (k, i) = (s.levels.top, s.levels.relegation);
    let plain = |name, v: f64| value(name, s, Clamped::new(v));
    Ok(alloc::vec![
        plain(IndexName::Tau, tau_rescaled(pair)?),
        plain(IndexName::Dn1, dn_champion(pair)?),
        plain(IndexName::AdnK, adn_top(pair, k)?),
        plain(IndexName::DnI, dn_relegation(pair, i)?),
        plain(IndexName::SdnKI, sdn(pair, k, i)?),
    ])
}

/// All indices for one country's seasons (any order; they are sorted).
/// Between-seasons indices start at the second season of each run of
/// consecutive seasons; G is reported at the end season of every complete
/// window.
pub fn country_indices<R: Replicator>(
    seasons: &[LeagueSeason],
    options: &IndexOptions,
    replicator: &R,
) -> Result<IndexTable> {
    let mut sorted: Vec<&LeagueSeason> = seasons.iter().collect();
    sorted.sort_by_key(|s| s.season);
    let mut table = IndexTable::default();
    for (pos, s) in sorted.iter().enumerate() {
        if !s.is_complete_schedule() {
            table.warnings.push(format!(
                "{} {}: incomplete schedule, deviations centred on the observed mean",
                s.country, s.season
            ));
        }
        let mut row = seasonal_indices(s)?;
        let prev = pos.checked_sub(1).map(|p| sorted[p]).filter(|p| p.season + 1 == s.season);
        if let Some(prev) = prev {
            let pair = SeasonPair::new(prev, s)?;
            row.extend(pair_indices(&pair)?);
        }
        let t = options.g_window;
        if t >= 2 && pos + 1 >= t {
            let run = &sorted[pos + 1 - t..=pos];
            if run.windows(2).all(|w| w[1].season == w[0].season + 1) {
                let owned: Vec<LeagueSeason> = run.iter().map(|s| (*s).clone()).collect();
                let window = TopKWindow::new(&owned, s.levels.top)?;
                let g = g_index(&window, options.mc_reps, options.seed, replicator)?;
                row.push(value(IndexName::G, s, Clamped::new(g.value)));
                table.g_diagnostics.push(GDiagnostic {
                    country: s.country.clone(),
                    season: s.season,
                    mc_reps: g.mc_reps,
                    seed: g.seed,
                    observed: g.observed,
                    e_hat: g.expected,
                    mc_se: g.mc_se,
                });
            }
        }
        let find = |n: IndexName| row.iter().find(|v| v.name == n).cloned();
        let mut combined = Vec::new();
        for b in [IndexName::Dc1, IndexName::AdcK, IndexName::DcI, IndexName::SdcKI] {
            let (sn, dn) = b.components().expect("bi-dimensional");
            if let (Some(sv), Some(dv)) = (find(sn), find(dn)) {
                combined.push(combine_bidimensional(&sv, &dv)?);
            }
        }
        row.extend(combined);
        row.sort_by_key(|v| v.name);
        table.values.extend(row);
    }
    Ok(table)
}

/// Indices for every country, in country then season order.
pub fn all_indices<R: Replicator>(
    by_country: &BTreeMap<String, Vec<LeagueSeason>>,
    options: &IndexOptions,
    replicator: &R,
) -> Result<IndexTable> {
    let mut table = IndexTable::default();
    for seasons in by_country.values() {
        table.extend(country_indices(seasons, options, replicator)?);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(name: IndexName, v: f64) -> IndexValue {
        IndexValue {
            name,
            country: "GRE".into(),
            season: 1990,
            value: v,
            flagged: false,
        }
    }

    #[test]
    fn bidimensional_is_midpoint() {
        for (s, d, e) in [(0.0, 0.0, 0.0), (1.0, 1.0, 1.0), (0.4, 0.8, 0.6)] {
            let c = combine_bidimensional(&iv(IndexName::ScrKI, s), &iv(IndexName::SdnKI, d)).unwrap();
            assert_eq!(c.name, IndexName::SdcKI);
            assert_eq!(c.value, (s + d) / 2.0);
            assert!((c.value - e).abs() < 1e-15);
        }
    }

    #[test]
    fn mismatched_pairs_rejected() {
        assert!(combine_bidimensional(&iv(IndexName::Ncr1, 0.1), &iv(IndexName::DnI, 0.2)).is_err());
        let mut other = iv(IndexName::Dn1, 0.2);
        other.season = 1991;
        assert!(combine_bidimensional(&iv(IndexName::Ncr1, 0.1), &other).is_err());
    }

    #[test]
    fn names_round_trip() {
        for n in IndexName::ALL {
            assert_eq!(n.code().parse::<IndexName>().unwrap(), n);
            assert_eq!(n.label().parse::<IndexName>().unwrap(), n);
        }
        assert!("nope".parse::<IndexName>().is_err());
    }
}
