//! Paired bootstrap resampling for comparing two systems under one metric.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::seed::rng_for;

pub const DEFAULT_BOOTSTRAP: usize = 1000;

/// One-sided p-value for "A scores higher than B": the fraction of
/// resamples in which A's mean does not exceed B's. A resample where the two
/// means are exactly equal counts one half.
pub fn paired_bootstrap(seg_a: &[f64], seg_b: &[f64], iterations: usize, seed: u64) -> Result<f64> {
    if seg_a.len() != seg_b.len() {
        return Err(Error::AlignmentMismatch(format!(
            "{} vs {} segments",
            seg_a.len(),
            seg_b.len()
        )));
    }
    let n = seg_a.len();
    if n < 2 {
        return Err(Error::SampleTooSmall(n));
    }
    if iterations == 0 {
        return Err(Error::InvalidConfig("bootstrap needs at least one iteration".into()));
    }
    let diffs: Vec<f64> = seg_a.iter().zip(seg_b).map(|(a, b)| a - b).collect();
    let halves: u64 = (0..iterations)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, "bootstrap", i as u64);
            let total: f64 = (0..n).map(|_| diffs[rng.random_range(0..n)]).sum();
            if total < 0.0 {
                2
            } else if total == 0.0 {
                1
            } else {
                0
            }
        })
        .sum();
    Ok(halves as f64 / (2 * iterations) as f64)
}

/// Paired bootstrap over per-segment scores keyed by segment id.
pub fn paired_bootstrap_keyed(
    seg_a: &BTreeMap<String, f64>,
    seg_b: &BTreeMap<String, f64>,
    iterations: usize,
    seed: u64,
) -> Result<f64> {
    if seg_a.len() != seg_b.len() || seg_a.keys().zip(seg_b.keys()).any(|(x, y)| x != y) {
        let missing = seg_a
            .keys()
            .find(|k| !seg_b.contains_key(*k))
            .or_else(|| seg_b.keys().find(|k| !seg_a.contains_key(*k)));
        return Err(Error::AlignmentMismatch(format!(
            "segment `{}` present for only one system",
            missing.map(String::as_str).unwrap_or("?")
        )));
    }
    let a: Vec<f64> = seg_a.values().copied().collect();
    let b: Vec<f64> = seg_b.values().copied().collect();
    paired_bootstrap(&a, &b, iterations, seed)
}

/// Significance marks: `††` for p < 0.01, `†` for p < 0.05.
pub fn dagger(p: f64) -> &'static str {
    if p < 0.01 {
        "††"
    } else if p < 0.05 {
        "†"
    } else {
        ""
    }
}
