//! Augmented Dickey-Fuller test with SIC lag choice and simulated
//! p-values.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use super::diagnostics::{Df, TestResult};
use crate::error::{Error, Result};
use crate::linalg::{least_squares, Matrix, Vector};
use crate::replicate::{replication_rng, tag, Replicator};
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Deterministic {
    Constant,
    ConstantTrend,
}

impl Deterministic {
    pub const ALL: [Deterministic; 2] = [Deterministic::Constant, Deterministic::ConstantTrend];

    pub fn code(self) -> &'static str {
        match self {
            Deterministic::Constant => "c",
            Deterministic::ConstantTrend => "ct",
        }
    }

    pub fn from_code(s: &str) -> Option<Self> {
        match s {
            "c" => Some(Deterministic::Constant),
            "ct" => Some(Deterministic::ConstantTrend),
            _ => None,
        }
    }

    fn columns(self) -> usize {
        match self {
            Deterministic::Constant => 1,
            Deterministic::ConstantTrend => 2,
        }
    }
}

/// Default maximum lag `floor(12 (T/100)^(1/4))`.
pub fn default_max_lag(len: usize) -> usize {
    libm::floor(12.0 * libm::pow(len as f64 / 100.0, 0.25)) as usize
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdfRegression {
    pub tau: f64,
    pub ssr: f64,
    pub nobs: usize,
    pub ncoef: usize,
}

impl AdfRegression {
    pub fn sic(&self) -> f64 {
        let n = self.nobs as f64;
        libm::log(self.ssr / n) + self.ncoef as f64 * libm::log(n) / n
    }
}

/// Fit the test regression with `lag` lagged differences on rows
/// `start..len` (`start >= lag + 1`).
pub fn adf_regression(y: &[f64], det: Deterministic, lag: usize, start: usize) -> Result<AdfRegression> {
    let start = start.max(lag + 1);
    let k = det.columns() + 1 + lag;
    if y.len() <= start || y.len() - start <= k {
        return Err(Error::TooShort {
            needed: start + k + 1,
            got: y.len(),
        });
    }
    let n = y.len() - start;
    let mut x = Matrix::zeros(n, k);
    let mut dy = Vector::zeros(n);
    for (row, t) in (start..y.len()).enumerate() {
        dy[row] = y[t] - y[t - 1];
        x[(row, 0)] = 1.0;
        if det == Deterministic::ConstantTrend {
            x[(row, 1)] = t as f64;
        }
        let c = det.columns();
        x[(row, c)] = y[t - 1];
        for j in 1..=lag {
            x[(row, c + j)] = y[t - j] - y[t - j - 1];
        }
    }
    let names: Vec<String> = (0..k).map(|j| format!("x{j}")).collect();
    let ls = least_squares(&dy, &x, &names)?;
    if !(ls.ssr > 0.0) {
        return Err(Error::Degenerate("ADF regression fits exactly".into()));
    }
    let s2 = ls.ssr / (n - k) as f64;
    let c = det.columns();
    let se = libm::sqrt(s2 * ls.xtx_inv[(c, c)]);
    Ok(AdfRegression {
        tau: ls.beta[c] / se,
        ssr: ls.ssr,
        nobs: n,
        ncoef: k,
    })
}

/// Lag minimizing SIC over `0..=max_lag` on the common sample that the
/// longest lag allows.
pub fn select_lag(y: &[f64], det: Deterministic, max_lag: usize) -> Result<usize> {
    let mut best = (f64::INFINITY, 0);
    for lag in 0..=max_lag {
        let sic = adf_regression(y, det, lag, max_lag + 1)?.sic();
        if sic < best.0 {
            best = (sic, lag);
        }
    }
    Ok(best.1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdfResult {
    pub test: TestResult,
    pub deterministic: Deterministic,
    pub lag: usize,
    pub nobs: usize,
}

/// ADF test with the lag chosen by SIC and the p-value read from `table`.
pub fn adf_test(series: &[f64], det: Deterministic, max_lag: Option<usize>, table: &AdfTable) -> Result<AdfResult> {
    let max_lag = max_lag.unwrap_or_else(|| default_max_lag(series.len()));
    if series.len() <= max_lag + 3 {
        return Err(Error::TooShort {
            needed: max_lag + 4,
            got: series.len(),
        });
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::Degenerate("series has non-finite values".into()));
    }
    if stats::variance(series) == 0.0 {
        return Err(Error::Degenerate("series is constant".into()));
    }
    let lag = select_lag(series, det, max_lag)?;
    let reg = adf_regression(series, det, lag, lag + 1)?;
    let p = table.p_value(det, reg.nobs, reg.tau)?;
    Ok(AdfResult {
        test: TestResult {
            name: format!("ADF ({})", det.code()),
            statistic: reg.tau,
            df: Df::None,
            p_value: p,
            note: format!("lag {lag} by SIC; simulated Dickey-Fuller distribution"),
        },
        deterministic: det,
        lag,
        nobs: reg.nobs,
    })
}

/// Sample sizes at which the null distribution is simulated.
pub const DEFAULT_BUCKETS: [usize; 6] = [25, 50, 100, 200, 400, 800];
pub const DEFAULT_REPS: u64 = 50_000;

/// Probability grid of the stored quantiles.
pub fn probability_grid() -> Vec<f64> {
    let mut g = alloc::vec![0.001, 0.0025];
    g.extend((1..200).map(|i| i as f64 * 0.005));
    g.extend([0.9975, 0.999]);
    g
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdfBucket {
    pub deterministic: Deterministic,
    pub nobs: usize,
    /// Quantiles at `AdfTable::probs`.
    pub quantiles: Vec<f64>,
}

/// Simulated quantiles of the Dickey-Fuller t statistic under a driftless
/// random walk.
#[derive(Debug, Clone, PartialEq)]
pub struct AdfTable {
    pub probs: Vec<f64>,
    pub buckets: Vec<AdfBucket>,
}

/// Dickey-Fuller tau for a Gaussian random walk with `nobs` regression rows.
fn simulate_tau(det: Deterministic, nobs: usize, rng: &mut impl Rng) -> f64 {
    // normal equations accumulated directly; k is at most 3
    let k = det.columns() + 1;
    let mut xtx = [[0.0f64; 3]; 3];
    let mut xty = [0.0f64; 3];
    let mut yty = 0.0;
    let mut level = 0.0f64;
    for t in 1..=nobs {
        let e: f64 = rng.sample(StandardNormal);
        let row = [1.0, if k == 3 { t as f64 } else { level }, level];
        let row = &row[..k];
        for a in 0..k {
            xty[a] += row[a] * e;
            for b in 0..k {
                xtx[a][b] += row[a] * row[b];
            }
        }
        yty += e * e;
        level += e;
    }
    let m = Matrix::from_fn(k, k, |a, b| xtx[a][b]);
    let inv = m.try_inverse().expect("random walk design is nonsingular");
    let v = Vector::from_fn(k, |a, _| xty[a]);
    let beta = &inv * &v;
    let ssr = yty - beta.dot(&v);
    let s2 = ssr / (nobs - k) as f64;
    beta[k - 1] / libm::sqrt(s2 * inv[(k - 1, k - 1)])
}

impl AdfTable {
    pub fn simulate<R: Replicator>(reps: u64, buckets: &[usize], seed: u64, replicator: &R) -> Self {
        let probs = probability_grid();
        let mut out = Vec::new();
        for det in Deterministic::ALL {
            for &nobs in buckets {
                let domain = tag(&format!("adf/{}/{nobs}", det.code()));
                let mut taus = replicator.map(reps, |rep| {
                    let mut rng = replication_rng(seed, domain, rep);
                    simulate_tau(det, nobs, &mut rng)
                });
                taus.sort_by(f64::total_cmp);
                let quantiles = probs.iter().map(|&p| stats::quantile_sorted(&taus, p)).collect();
                out.push(AdfBucket {
                    deterministic: det,
                    nobs,
                    quantiles,
                });
            }
        }
        AdfTable { probs, buckets: out }
    }

    /// Rows `(case, T, probability, quantile)`.
    pub fn to_rows(&self) -> Vec<(Deterministic, usize, f64, f64)> {
        let mut rows = Vec::new();
        for b in &self.buckets {
            for (p, q) in self.probs.iter().zip(&b.quantiles) {
                rows.push((b.deterministic, b.nobs, *p, *q));
            }
        }
        rows
    }

    pub fn from_rows(rows: &[(Deterministic, usize, f64, f64)]) -> Result<Self> {
        let mut buckets: Vec<AdfBucket> = Vec::new();
        let mut probs: Vec<f64> = Vec::new();
        for &(det, nobs, p, q) in rows {
            match buckets.last_mut() {
                Some(b) if b.deterministic == det && b.nobs == nobs => b.quantiles.push(q),
                _ => buckets.push(AdfBucket {
                    deterministic: det,
                    nobs,
                    quantiles: alloc::vec![q],
                }),
            }
            if buckets.len() == 1 {
                probs.push(p);
            }
        }
        let table = AdfTable { probs, buckets };
        table.validate()?;
        Ok(table)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Schema(format!("ADF quantile table: {msg}")));
        if self.probs.len() < 2 || self.probs.windows(2).any(|w| !(w[0] < w[1])) {
            return bad("probabilities must be increasing");
        }
        for det in Deterministic::ALL {
            let sizes: Vec<usize> = self.case(det).map(|b| b.nobs).collect();
            if sizes.is_empty() {
                return bad(&format!("no buckets for case {}", det.code()));
            }
            if sizes.windows(2).any(|w| w[0] >= w[1]) {
                return bad("sample sizes must be increasing within a case");
            }
        }
        for b in &self.buckets {
            if b.quantiles.len() != self.probs.len() {
                return bad("every bucket needs one quantile per probability");
            }
            if b.quantiles.windows(2).any(|w| w[0] > w[1]) {
                return bad("quantiles must be non-decreasing");
            }
        }
        Ok(())
    }

    fn case(&self, det: Deterministic) -> impl Iterator<Item = &AdfBucket> {
        self.buckets.iter().filter(move |b| b.deterministic == det)
    }

    /// Quantiles at sample size `nobs`, linear in 1/T between buckets and
    /// held constant beyond the outermost ones.
    fn quantiles_at(&self, det: Deterministic, nobs: usize) -> Result<Vec<f64>> {
        let case: Vec<&AdfBucket> = self.case(det).collect();
        let (first, last) = match (case.first(), case.last()) {
            (Some(f), Some(l)) => (*f, *l),
            _ => return Err(Error::Schema(format!("no ADF quantiles for case {}", det.code()))),
        };
        if nobs <= first.nobs {
            return Ok(first.quantiles.clone());
        }
        if nobs >= last.nobs {
            return Ok(last.quantiles.clone());
        }
        let hi = case.iter().position(|b| b.nobs >= nobs).expect("bracketed");
        let (a, b) = (case[hi - 1], case[hi]);
        let inv = |t: usize| 1.0 / t as f64;
        let w = (inv(nobs) - inv(a.nobs)) / (inv(b.nobs) - inv(a.nobs));
        Ok(a.quantiles.iter().zip(&b.quantiles).map(|(x, y)| x + w * (y - x)).collect())
    }

    /// Left-tail p-value of `tau`, clamped to the probability grid.
    pub fn p_value(&self, det: Deterministic, nobs: usize, tau: f64) -> Result<f64> {
        let q = self.quantiles_at(det, nobs)?;
        let n = q.len();
        if tau <= q[0] {
            return Ok(self.probs[0]);
        }
        if tau >= q[n - 1] {
            return Ok(self.probs[n - 1]);
        }
        let hi = q.iter().position(|&v| v >= tau).expect("bracketed");
        let (q0, q1) = (q[hi - 1], q[hi]);
        let (p0, p1) = (self.probs[hi - 1], self.probs[hi]);
        if q1 == q0 {
            return Ok(p1);
        }
        Ok(p0 + (tau - q0) / (q1 - q0) * (p1 - p0))
    }
}
