use serde::{Deserialize, Serialize};

use super::ensemble::EnsembleStats;
use crate::error::{Error, Result};

pub const MIN_FIT_POINTS: usize = 10;

/// Inclusive iteration range used by [`fit_power_law`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitWindow {
    pub k_min: u64,
    pub k_max: u64,
}

impl FitWindow {
    pub fn new(k_min: u64, k_max: u64) -> Self {
        Self { k_min, k_max }
    }

    /// `[max(100, iterations / 100), iterations]`, skipping the schedule-dominated transient.
    pub fn default_for(iterations: u64) -> Self {
        Self::new(100.max(iterations / 100), iterations)
    }

    pub fn contains(&self, k: u64) -> bool {
        (self.k_min..=self.k_max).contains(&k)
    }
}

/// `median(k) ~ c k^beta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub c: f64,
    pub beta: f64,
    pub window: FitWindow,
    pub points: usize,
    /// RMS of the log-space residuals.
    pub residual: f64,
}

impl PowerLawFit {
    pub fn eval(&self, k: f64) -> f64 {
        self.c * k.powf(self.beta)
    }
}

/// Ordinary least squares of `ln median` on `ln k` inside `window`.
pub fn fit_power_law(stats: &EnsembleStats, window: FitWindow) -> Result<PowerLawFit> {
    let pts: Vec<(f64, f64)> = stats
        .rows
        .iter()
        .filter(|r| window.contains(r.iteration))
        .map(|r| (r.iteration as f64, r.median))
        .collect();
    if pts.len() < MIN_FIT_POINTS {
        return Err(Error::FitDomain(format!(
            "{} points in window [{}, {}], need at least {MIN_FIT_POINTS}",
            pts.len(),
            window.k_min,
            window.k_max
        )));
    }
    if let Some((k, m)) = pts.iter().find(|(k, m)| !m.is_finite() || *m <= 0.0 || *k <= 0.0) {
        return Err(Error::FitDomain(format!("non-positive median {m} at iteration {k}")));
    }
    let xy: Vec<(f64, f64)> = pts.iter().map(|(k, m)| (k.ln(), m.ln())).collect();
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return Err(Error::FitDomain("all points share one iteration".into()));
    }
    let beta = sxy / sxx;
    let intercept = my - beta * mx;
    let ss: f64 = xy.iter().map(|(x, y)| (y - intercept - beta * x).powi(2)).sum();
    Ok(PowerLawFit {
        c: intercept.exp(),
        beta,
        window,
        points: xy.len(),
        residual: (ss / n).sqrt(),
    })
}
