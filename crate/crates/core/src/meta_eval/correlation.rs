//! Pearson product-moment correlation and Kendall's tau-b.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationKind {
    PearsonR,
    KendallTauB,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub kind: CorrelationKind,
    pub value: f64,
    pub n: usize,
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::SampleTooSmall(x.len()));
    }
    Ok(())
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn pearson(x: &[f64], y: &[f64]) -> Result<CorrelationResult> {
    check_pair(x, y)?;
    let (mx, my) = (mean(x), mean(y));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::ZeroVariance("first argument of pearson".into()));
    }
    if syy == 0.0 {
        return Err(Error::ZeroVariance("second argument of pearson".into()));
    }
    let r = sxy / (sxx * syy).sqrt();
    Ok(CorrelationResult {
        kind: CorrelationKind::PearsonR,
        value: r.clamp(-1.0, 1.0),
        n: x.len(),
    })
}

fn cmp(a: f64, b: f64) -> Ordering {
    // +0.0 normalizes -0.0 so that the two zeros compare equal
    (a + 0.0).total_cmp(&(b + 0.0))
}

fn tie_pairs(sorted: &[f64]) -> u64 {
    let mut total = 0u64;
    let mut run = 1u64;
    for w in sorted.windows(2) {
        if cmp(w[0], w[1]) == Ordering::Equal {
            run += 1;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    total + run * (run - 1) / 2
}

/// Sorts `v` ascending and returns the number of strict inversions.
fn sort_counting_inversions(v: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = sort_counting_inversions(&mut v[..mid], &mut buf[..mid]);
    swaps += sort_counting_inversions(&mut v[mid..], &mut buf[mid..]);
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if cmp(v[j], v[i]) == Ordering::Less {
            buf[k] = v[j];
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            buf[k] = v[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + (mid - i)].copy_from_slice(&v[i..mid]);
    k += mid - i;
    buf[k..k + (n - j)].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&buf[..n]);
    swaps
}

/// Kendall's tau-b, `(C - D) / sqrt((C + D + T_x)(C + D + T_y))`, computed in
/// O(n log n) with Knight's merge-sort algorithm.
pub fn kendall_tau_b(x: &[f64], y: &[f64]) -> Result<CorrelationResult> {
    check_pair(x, y)?;
    let n = x.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| cmp(x[a], x[b]).then(cmp(y[a], y[b])));

    let mut x_ties = 0u64;
    let mut joint_ties = 0u64;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && cmp(x[order[end]], x[order[start]]) == Ordering::Equal {
            end += 1;
        }
        let t = (end - start) as u64;
        x_ties += t * (t - 1) / 2;
        let mut s = start;
        while s < end {
            let mut e = s + 1;
            while e < end && cmp(y[order[e]], y[order[s]]) == Ordering::Equal {
                e += 1;
            }
            let u = (e - s) as u64;
            joint_ties += u * (u - 1) / 2;
            s = e;
        }
        start = end;
    }

    let mut ys: Vec<f64> = order.iter().map(|&i| y[i]).collect();
    let mut buf = vec![0.0; n];
    let discordant = sort_counting_inversions(&mut ys, &mut buf);
    let y_ties = tie_pairs(&ys);

    let total = (n as u64) * (n as u64 - 1) / 2;
    if x_ties == total || y_ties == total {
        return Err(Error::AllTied);
    }
    let numerator = total as i128 - x_ties as i128 - y_ties as i128 + joint_ties as i128 - 2 * discordant as i128;
    let denominator = (((total - x_ties) as u128 * (total - y_ties) as u128) as f64).sqrt();
    let tau = numerator as f64 / denominator;
    Ok(CorrelationResult {
        kind: CorrelationKind::KendallTauB,
        value: tau.clamp(-1.0, 1.0),
        n,
    })
}
