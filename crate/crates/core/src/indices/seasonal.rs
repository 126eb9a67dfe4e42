//! Within-season balance indices. Inputs are winning percentages ordered by
//! final rank; every index is scaled so that 0 is perfect balance and 1 is
//! the completely unbalanced (CU) season.
//!
//! Win profiles are first rescaled to mean 1/2. For a complete schedule this
//! is the identity; for an abandoned season it centres deviations on the
//! observed mean and keeps the indices invariant to the win-point scale.

use alloc::format;
use alloc::vec::Vec;

use super::Clamped;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceDistribution {
    pub n: usize,
    /// CU winning percentages, (n - i) / (n - 1) for rank i.
    pub w_cu: Vec<f64>,
    /// CU win-point shares, 2 (n - i) / (n (n - 1)).
    pub share_cu: Vec<f64>,
    /// Perfect balance, all 1/2.
    pub w_pb: Vec<f64>,
}

impl ReferenceDistribution {
    pub fn new(n: usize) -> Result<Self> {
        require_teams(n)?;
        let nf = n as f64;
        let w_cu = (1..=n).map(|i| (n - i) as f64 / (nf - 1.0)).collect();
        let share_cu = (1..=n)
            .map(|i| 2.0 * (n - i) as f64 / (nf * (nf - 1.0)))
            .collect();
        Ok(ReferenceDistribution {
            n,
            w_cu,
            share_cu,
            w_pb: alloc::vec![0.5; n],
        })
    }
}

/// Rank weights for the three-level indices: K+2-r over the top K places,
/// 1 over the bottom I, 0 in between.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightScheme {
    pub n: usize,
    pub top: usize,
    pub relegation: usize,
    weights: Vec<f64>,
}

impl WeightScheme {
    pub fn new(n: usize, top: usize, relegation: usize) -> Result<Self> {
        check_levels(n, top, relegation)?;
        let weights = (1..=n)
            .map(|r| {
                if r <= top {
                    (top + 2 - r) as f64
                } else if r > n - relegation {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        Ok(WeightScheme {
            n,
            top,
            relegation,
            weights,
        })
    }

    /// Weight of (1-based) rank `r`.
    pub fn weight(&self, r: usize) -> f64 {
        self.weights[r - 1]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

fn require_teams(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Degenerate(format!("league with {n} team(s)")));
    }
    Ok(())
}

pub(crate) fn check_levels(n: usize, top: usize, relegation: usize) -> Result<()> {
    if top < 1 || relegation < 1 || top + relegation >= n {
        return Err(Error::OutOfRange {
            what: "K + I",
            value: (top + relegation) as f64,
            detail: format!("K = {top}, I = {relegation}, n = {n}"),
        });
    }
    Ok(())
}

fn check_top(n: usize, k: usize) -> Result<()> {
    if k < 1 || k >= n {
        return Err(Error::OutOfRange {
            what: "K",
            value: k as f64,
            detail: format!("need 1 <= K < n = {n}"),
        });
    }
    Ok(())
}

fn check_bottom(n: usize, i: usize) -> Result<()> {
    if i < 1 || i >= n {
        return Err(Error::OutOfRange {
            what: "I",
            value: i as f64,
            detail: format!("need 1 <= I < n = {n}"),
        });
    }
    Ok(())
}

/// Rescales `w` to mean 1/2.
fn centred(w: &[f64]) -> Result<Vec<f64>> {
    require_teams(w.len())?;
    if w.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidParameter(
            "winning percentages must be finite and non-negative".into(),
        ));
    }
    let total: f64 = w.iter().sum();
    if total <= 0.0 {
        return Err(Error::Degenerate("no win-points in season".into()));
    }
    let half_n = 0.5 * w.len() as f64;
    if total == half_n {
        return Ok(w.to_vec());
    }
    let scale = half_n / total;
    Ok(w.iter().map(|v| v * scale).collect())
}

fn cu(n: usize) -> Result<Vec<f64>> {
    centred(&ReferenceDistribution::new(n)?.w_cu)
}

/// Normalised standard deviation of winning percentages.
pub fn namsi(w: &[f64]) -> Result<Clamped> {
    let w = centred(w)?;
    let ss = |v: &[f64]| v.iter().map(|x| (x - 0.5) * (x - 0.5)).sum::<f64>();
    let reference = ss(&cu(w.len())?);
    Ok(Clamped::new(libm::sqrt(ss(&w) / reference)))
}

/// Normalised Herfindahl-Hirschman index of win-point shares.
pub fn hhi_star(w: &[f64]) -> Result<Clamped> {
    let w = centred(w)?;
    let n = w.len() as f64;
    // HHI - 1/n written as the share dispersion so equal shares give exactly 0
    let excess = |v: &[f64]| {
        let total: f64 = v.iter().sum();
        v.iter()
            .map(|x| (x / total - 1.0 / n) * (x / total - 1.0 / n))
            .sum::<f64>()
    };
    let reference = excess(&cu(w.len())?);
    Ok(Clamped::new(excess(&w) / reference))
}

fn gini(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let mut diff = 0.0;
    for a in x {
        for b in x {
            diff += (a - b).abs();
        }
    }
    diff / (2.0 * n * n * mean)
}

/// Gini coefficient of winning percentages relative to the CU Gini.
pub fn adjusted_gini(w: &[f64]) -> Result<Clamped> {
    let w = centred(w)?;
    Ok(Clamped::new(gini(&w) / gini(&cu(w.len())?)))
}

/// Champion concentration, 2 (w_1 - 1/2).
pub fn ncr_champion(w: &[f64]) -> Result<Clamped> {
    let w = centred(w)?;
    let reference = cu(w.len())?;
    Ok(Clamped::new((w[0] - 0.5) / (reference[0] - 0.5)))
}

fn top_excess(w: &[f64], k: usize) -> f64 {
    (1..=k).map(|j| (k + 1 - j) as f64 * (w[j - 1] - 0.5)).sum()
}

/// Top-K concentration with linearly decreasing weights K+1-j.
pub fn acr_top(w: &[f64], k: usize) -> Result<Clamped> {
    check_top(w.len(), k)?;
    let w = centred(w)?;
    let reference = cu(w.len())?;
    Ok(Clamped::new(top_excess(&w, k) / top_excess(&reference, k)))
}

fn bottom_deficit(w: &[f64], i: usize) -> f64 {
    let n = w.len();
    w[n - i..].iter().map(|x| 0.5 - x).sum()
}

/// Relegation-zone concentration: shortfall of the bottom I against 1/2,
/// relative to the CU shortfall I/2 - I(I-1)/(2(n-1)).
pub fn ncr_relegation(w: &[f64], i: usize) -> Result<Clamped> {
    check_bottom(w.len(), i)?;
    let w = centred(w)?;
    let reference = cu(w.len())?;
    Ok(Clamped::new(bottom_deficit(&w, i) / bottom_deficit(&reference, i)))
}

fn special_excess(w: &[f64], scheme: &WeightScheme) -> f64 {
    let n = w.len();
    let mut s = 0.0;
    for r in 1..=scheme.top {
        s += scheme.weight(r) * (w[r - 1] - 0.5);
    }
    for r in n - scheme.relegation + 1..=n {
        s += scheme.weight(r) * (0.5 - w[r - 1]);
    }
    s
}

/// Three-level concentration over the top K and bottom I places.
pub fn scr(w: &[f64], k: usize, i: usize) -> Result<Clamped> {
    let scheme = WeightScheme::new(w.len(), k, i)?;
    let w = centred(w)?;
    let reference = cu(w.len())?;
    Ok(Clamped::new(
        special_excess(&w, &scheme) / special_excess(&reference, &scheme),
    ))
}
