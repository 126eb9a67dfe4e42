//! Attendance panels generated from a known error-correction equation
//! with contemporaneously correlated errors.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::econometrics::design::{Term, Var};
use crate::error::{Error, Result};
use crate::indices::{IndexName, IndexSeries};
use crate::panel::{MacroObservation, D97_LAST_UNTREATED};
use crate::replicate::{replication_rng, tag};

#[derive(Debug, Clone, PartialEq)]
pub struct DgpParams {
    /// (country, first season, last season).
    pub countries: Vec<(String, i32, i32)>,
    pub index: IndexName,
    /// A(1): speed of adjustment towards the long-run relation.
    pub adjustment: f64,
    /// Long-run elasticities of CB, POP, RGNI, UN.
    pub long_run: [f64; 4],
    /// Coefficients on the current and lagged differences of each
    /// regressor (lags 0 and 1).
    pub short_run: [[f64; 2]; 4],
    /// Coefficient on the lagged difference of log attendance.
    pub att_diff: f64,
    pub d97: f64,
    /// Coefficients on t, t^2, ...
    pub trend: Vec<f64>,
    /// AR(1) coefficient and innovation sd of ln CB around its country mean.
    pub cb_persistence: f64,
    pub cb_innovation_sd: f64,
    pub sigma: f64,
    /// Equicorrelation of the errors across countries.
    pub rho: f64,
    pub burn_in: usize,
    pub seed: u64,
}

impl DgpParams {
    /// `countries` balanced panels of `seasons` seasons ending in 2008.
    pub fn balanced(countries: usize, seasons: usize) -> Self {
        let first = 2008 - seasons as i32 + 1;
        DgpParams {
            countries: (1..=countries).map(|i| (format!("C{i:02}"), first, 2008)).collect(),
            index: IndexName::SdcKI,
            adjustment: 0.2,
            long_run: [-1.0, 1.5, 0.5, 0.15],
            short_run: [[-0.15, 0.0], [0.0, 0.0], [0.15, 0.0], [0.0, 0.0]],
            att_diff: -0.1,
            d97: 0.03,
            trend: alloc::vec![-0.003, 0.00004],
            cb_persistence: 0.6,
            cb_innovation_sd: 0.2,
            sigma: 0.05,
            rho: 0.4,
            burn_in: 30,
            seed: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.countries.is_empty() {
            return Err(Error::InvalidParameter("no countries".into()));
        }
        if let Some((c, _, _)) = self.countries.iter().find(|(_, a, b)| b < a) {
            return Err(Error::InvalidParameter(format!("{c}: last season before first")));
        }
        if !(self.sigma > 0.0) {
            return Err(Error::InvalidParameter("sigma must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.rho) {
            return Err(Error::InvalidParameter("rho must lie in [0, 1)".into()));
        }
        if !(self.cb_persistence.abs() < 1.0) {
            return Err(Error::InvalidParameter("ln CB persistence must lie in (-1, 1)".into()));
        }
        if !(self.adjustment > 0.0 && self.adjustment < 2.0) {
            return Err(Error::InvalidParameter("adjustment must lie in (0, 2)".into()));
        }
        Ok(())
    }

    /// True coefficients of the order-2 error-correction design, keyed by
    /// term (country intercepts excluded).
    pub fn coefficients(&self) -> Vec<(Term, f64)> {
        let mut out = Vec::new();
        for (j, var) in Var::REGRESSORS.into_iter().enumerate() {
            out.push((Term::Level { var, lag: 1 }, self.adjustment * self.long_run[j]));
            for lag in 0..2 {
                out.push((Term::Diff { var, lag }, self.short_run[j][lag]));
            }
        }
        out.push((Term::Level { var: Var::Att, lag: 1 }, -self.adjustment));
        out.push((Term::Diff { var: Var::Att, lag: 1 }, self.att_diff));
        out.push((Term::D97, self.d97));
        for (g, c) in self.trend.iter().enumerate() {
            out.push((Term::Trend(g as u32 + 1), *c));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DgpPanel {
    pub observations: Vec<MacroObservation>,
    pub index: IndexSeries,
    /// Country intercepts C_i.
    pub intercepts: BTreeMap<String, f64>,
}

struct Ar1 {
    mean: f64,
    phi: f64,
    sd: f64,
}

/// Simulate the panel. Regressors: ln CB and ln UN are stationary AR(1)
/// around country means; ln POP and ln RGNI are random walks with drift.
pub fn simulate_dgp(params: &DgpParams) -> Result<DgpPanel> {
    params.validate()?;
    let first = params.countries.iter().map(|c| c.1).min().expect("non-empty");
    let last = params.countries.iter().map(|c| c.2).max().expect("non-empty");
    let origin = first - 1;
    let start = first - params.burn_in as i32 - 2;
    let span = (last - start + 1) as usize;
    let m = params.countries.len();

    // equicorrelated errors by calendar season
    let mut err_rng = replication_rng(params.seed, tag("dgp/errors"), 0);
    let (a, b) = (libm::sqrt(params.rho), libm::sqrt(1.0 - params.rho));
    let errors: Vec<Vec<f64>> = (0..span)
        .map(|_| {
            let common: f64 = err_rng.sample(StandardNormal);
            (0..m)
                .map(|_| {
                    let own: f64 = err_rng.sample(StandardNormal);
                    params.sigma * (a * common + b * own)
                })
                .collect()
        })
        .collect();

    let coefs = params.coefficients();
    let mut observations = Vec::new();
    let mut index = IndexSeries::new(params.index);
    let mut intercepts = BTreeMap::new();
    for (ci, (country, c_first, c_last)) in params.countries.iter().enumerate() {
        let mut rng = replication_rng(params.seed, tag("dgp/regressors"), ci as u64);
        let mut normal = || -> f64 { rng.sample(StandardNormal) };
        let cb = Ar1 {
            mean: libm::log(0.5) + 0.1 * normal(),
            phi: params.cb_persistence,
            sd: params.cb_innovation_sd,
        };
        let un = Ar1 {
            mean: libm::log(6.0) + 0.3 * normal(),
            phi: 0.7,
            sd: 0.15,
        };
        let mut x = [Vec::with_capacity(span), Vec::with_capacity(span), Vec::with_capacity(span), Vec::with_capacity(span)];
        let (mut lcb, mut lpop, mut lrgni, mut lun) = (cb.mean, libm::log(8e6) + 0.5 * normal(), libm::log(1e4) + 0.2 * normal(), un.mean);
        for _ in 0..span {
            x[0].push(lcb);
            x[1].push(lpop);
            x[2].push(lrgni);
            x[3].push(lun);
            lcb = cb.mean + cb.phi * (lcb - cb.mean) + cb.sd * normal();
            lpop += 0.005 + 0.02 * normal();
            lrgni += 0.02 + 0.04 * normal();
            lun = un.mean + un.phi * (lun - un.mean) + un.sd * normal();
        }
        // intercept placing equilibrium attendance near 10,000 at the start
        let target = libm::log(10_000.0) + 0.3 * normal();
        let c_i = params.adjustment * target
            - (0..4).map(|j| params.adjustment * params.long_run[j] * x[j][0]).sum::<f64>();
        intercepts.insert(country.clone(), c_i);

        let season_of = |k: usize| start + k as i32;
        let value = |var: Var, k: usize, att: &[f64]| match var {
            Var::Cb => x[0][k],
            Var::Pop => x[1][k],
            Var::Rgni => x[2][k],
            Var::Un => x[3][k],
            Var::Att => att[k],
        };
        let mut att = alloc::vec![target, target];
        for k in 2..span {
            let t = f64::from(season_of(k) - origin);
            let mut d = c_i + errors[k][ci];
            for (term, c) in &coefs {
                d += c * match *term {
                    Term::Level { var, lag } => value(var, k - lag, &att),
                    Term::Diff { var, lag } => value(var, k - lag, &att) - value(var, k - lag - 1, &att),
                    Term::D97 => f64::from(u8::from(season_of(k) > D97_LAST_UNTREATED)),
                    Term::Trend(g) => libm::pow(t, f64::from(g)),
                    Term::Intercept(_) | Term::Other => 0.0,
                };
            }
            let next = att[k - 1] + d;
            att.push(next);
        }
        for k in 0..span {
            let season = season_of(k);
            if season < *c_first || season > *c_last {
                continue;
            }
            observations.push(MacroObservation {
                country: country.clone(),
                season,
                attendance_per_game: libm::exp(att[k]),
                population: libm::exp(x[1][k]),
                rgni: libm::exp(x[2][k]),
                unemployment: libm::exp(x[3][k]),
            });
            index.values.insert((country.clone(), season), libm::exp(x[0][k]));
        }
    }
    Ok(DgpPanel {
        observations,
        index,
        intercepts,
    })
}
