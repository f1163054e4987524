//! Confidence interval for the difference of two dependent, overlapping
//! correlations `r12 - r13` that share variable 1 (the human scores).
//!
//! Each correlation gets a Fisher-z interval; the two are combined with the
//! correlation between the correlation estimates:
//!
//! ```text
//! c = ((r23 - r12 r13 / 2)(1 - r12² - r13² - r23²) + r23³) / ((1 - r12²)(1 - r13²))
//! L = d - sqrt((r12 - l1)² + (u2 - r13)² - 2c (r12 - l1)(u2 - r13))
//! U = d + sqrt((u1 - r12)² + (r13 - l2)² - 2c (u1 - r12)(r13 - l2))
//! ```
//! with `d = r12 - r13`.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

pub const DEFAULT_LEVEL: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CIResult {
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
}

impl CIResult {
    pub fn excludes_zero(&self) -> bool {
        self.lower > 0.0 || self.upper < 0.0
    }
}

/// Two-sided standard normal critical value for `level`.
pub fn normal_critical(level: f64) -> f64 {
    let n = Normal::new(0.0, 1.0).expect("standard normal");
    n.inverse_cdf(1.0 - (1.0 - level) / 2.0)
}

/// Fisher-z interval `(l, u)` for a correlation `r` estimated from `n` pairs.
pub fn fisher_interval(r: f64, n: usize, crit: f64) -> (f64, f64) {
    let z = r.atanh();
    let half = crit / ((n as f64) - 3.0).sqrt();
    ((z - half).tanh(), (z + half).tanh())
}

/// Correlation between the estimates of `r12` and `r13`.
pub fn correlation_of_correlations(r12: f64, r13: f64, r23: f64) -> f64 {
    ((r23 - 0.5 * r12 * r13) * (1.0 - r12 * r12 - r13 * r13 - r23 * r23) + r23.powi(3))
        / ((1.0 - r12 * r12) * (1.0 - r13 * r13))
}

pub fn zou_ci(r12: f64, r13: f64, r23: f64, n: usize, level: f64) -> Result<CIResult> {
    if n < 4 {
        return Err(Error::SampleTooSmall(n));
    }
    for r in [r12, r13] {
        if !r.is_finite() || r.abs() >= 1.0 {
            return Err(Error::DegenerateCorrelation(r));
        }
    }
    if !r23.is_finite() || r23.abs() > 1.0 {
        return Err(Error::DegenerateCorrelation(r23));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidConfig(format!("confidence level {level} outside (0, 1)")));
    }
    let crit = normal_critical(level);
    let (l1, u1) = fisher_interval(r12, n, crit);
    let (l2, u2) = fisher_interval(r13, n, crit);
    let c = correlation_of_correlations(r12, r13, r23);
    let d = r12 - r13;
    let lower_sq = (r12 - l1).powi(2) + (u2 - r13).powi(2) - 2.0 * c * (r12 - l1) * (u2 - r13);
    let upper_sq = (u1 - r12).powi(2) + (r13 - l2).powi(2) - 2.0 * c * (u1 - r12) * (r13 - l2);
    Ok(CIResult {
        lower: d - lower_sq.max(0.0).sqrt(),
        upper: d + upper_sq.max(0.0).sqrt(),
        level,
    })
}
