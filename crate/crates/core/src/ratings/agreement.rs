//! Inter-annotator agreement: one-vs-rest Pearson and Krippendorff's alpha
//! (interval metric).

use std::collections::BTreeMap;

use serde::Serialize;

use crate::corpus::RatingRecord;
use crate::error::{Error, Result};
use crate::meta_eval::correlation::pearson;
use crate::ratings::normalize::znormalize;

/// `(seg_id, system_id, is_trap)`
pub type ItemKey = (String, String, bool);

/// Minimum number of shared items for a one-vs-rest correlation.
pub const MIN_SHARED_ITEMS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AgreementScale {
    Raw,
    Z,
}

/// Annotator × item score matrix of one task.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RatingMatrix {
    pub by_annotator: BTreeMap<String, BTreeMap<ItemKey, f64>>,
}

impl RatingMatrix {
    /// Builds the matrix; if an annotator rated an item twice the first
    /// rating is kept.
    pub fn from_values(values: impl IntoIterator<Item = (String, ItemKey, f64)>) -> Self {
        let mut by_annotator: BTreeMap<String, BTreeMap<ItemKey, f64>> = BTreeMap::new();
        for (annotator, item, value) in values {
            by_annotator.entry(annotator).or_default().entry(item).or_insert(value);
        }
        RatingMatrix { by_annotator }
    }

    /// Ratings of one task on the requested scale.
    pub fn build(ratings: &[RatingRecord], include_traps: bool, scale: AgreementScale) -> Result<Self> {
        Ok(match scale {
            AgreementScale::Raw => RatingMatrix::from_values(
                ratings
                    .iter()
                    .filter(|r| include_traps || !r.is_trap)
                    .map(|r| (r.annotator_id.clone(), r.item_key(), f64::from(r.raw_score))),
            ),
            AgreementScale::Z => RatingMatrix::from_values(
                znormalize(ratings, include_traps)?
                    .into_iter()
                    .map(|n| (n.record.annotator_id.clone(), n.record.item_key(), n.z)),
            ),
        })
    }

    /// item -> values from every annotator who rated it
    pub fn units(&self) -> BTreeMap<&ItemKey, Vec<f64>> {
        let mut units: BTreeMap<&ItemKey, Vec<f64>> = BTreeMap::new();
        for items in self.by_annotator.values() {
            for (item, &v) in items {
                units.entry(item).or_default().push(v);
            }
        }
        units
    }

    pub fn item_count(&self) -> usize {
        self.units().len()
    }
}

/// Mean over annotators of the Pearson correlation between the annotator's
/// scores and the unweighted mean of the other annotators' scores, over the
/// items they share.
pub fn one_vs_rest(matrix: &RatingMatrix) -> Result<f64> {
    if matrix.by_annotator.len() < 2 {
        return Err(Error::InsufficientOverlap {
            annotator: matrix.by_annotator.keys().next().cloned().unwrap_or_default(),
            shared: 0,
        });
    }
    let mut rs = Vec::with_capacity(matrix.by_annotator.len());
    for (annotator, items) in &matrix.by_annotator {
        let mut own = Vec::new();
        let mut rest = Vec::new();
        for (item, &v) in items {
            let others: Vec<f64> = matrix
                .by_annotator
                .iter()
                .filter(|(a, _)| *a != annotator)
                .filter_map(|(_, m)| m.get(item).copied())
                .collect();
            if !others.is_empty() {
                own.push(v);
                rest.push(others.iter().sum::<f64>() / others.len() as f64);
            }
        }
        if own.len() < MIN_SHARED_ITEMS {
            return Err(Error::InsufficientOverlap {
                annotator: annotator.clone(),
                shared: own.len(),
            });
        }
        rs.push(pearson(&own, &rest)?.value);
    }
    Ok(rs.iter().sum::<f64>() / rs.len() as f64)
}

/// Sum over ordered pairs `i != j` of `(v_i - v_j)^2`, via
/// `2 (m Σv² - (Σv)²)` around the mean for stability.
fn pairwise_sq_diff(values: &[f64]) -> f64 {
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    2.0 * m * values.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
}

/// Krippendorff's alpha with the interval difference `(a - b)^2`.
/// Units with a single rating are not pairable and are skipped. When every
/// pairable value is identical the expected disagreement is zero and alpha
/// is defined as 1.
pub fn krippendorff_alpha(matrix: &RatingMatrix) -> Result<f64> {
    let units: Vec<Vec<f64>> = matrix.units().into_values().filter(|v| v.len() >= 2).collect();
    if units.is_empty() {
        return Err(Error::NoPairableUnits);
    }
    let n: usize = units.iter().map(Vec::len).sum();
    let observed: f64 = units
        .iter()
        .map(|u| pairwise_sq_diff(u) / (u.len() - 1) as f64)
        .sum::<f64>()
        / n as f64;
    let all: Vec<f64> = units.iter().flatten().copied().collect();
    let expected = pairwise_sq_diff(&all) / (n * (n - 1)) as f64;
    if expected == 0.0 {
        return Ok(1.0);
    }
    Ok(1.0 - observed / expected)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AgreementResult {
    pub one_vs_rest_r: f64,
    pub krippendorff_alpha: f64,
    pub with_traps: bool,
    pub n_items: usize,
}

/// Both agreement statistics over the same item set of one task.
pub fn agreement(ratings: &[RatingRecord], include_traps: bool, scale: AgreementScale) -> Result<AgreementResult> {
    let matrix = RatingMatrix::build(ratings, include_traps, scale)?;
    Ok(AgreementResult {
        one_vs_rest_r: one_vs_rest(&matrix)?,
        krippendorff_alpha: krippendorff_alpha(&matrix)?,
        with_traps: include_traps,
        n_items: matrix.item_count(),
    })
}
