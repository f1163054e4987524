//! PERM-BOTH permutation test for the difference between two metrics'
//! segment-level Kendall correlations with the human scores.
//!
//! Every replicate flips an independent fair coin per `(system, segment)`
//! cell and swaps the two metrics' scores in that cell when it lands heads.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::meta_eval::correlation::kendall_tau_b;
use crate::meta_eval::segment::pooled_pairs;
use crate::meta_eval::table::{CellKey, ScoreTable};
use crate::seed::rng_for;

pub const DEFAULT_PERMUTATIONS: usize = 1000;

/// Observed difference and the permutation distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct PermutationOutcome {
    pub observed: f64,
    pub replicates: Vec<f64>,
}

impl PermutationOutcome {
    /// One-sided p-value for "A correlates better than B":
    /// `(1 + #{delta* >= delta}) / (R + 1)`.
    pub fn p_value(&self) -> f64 {
        let hits = self.replicates.iter().filter(|&&d| d >= self.observed).count();
        (1 + hits) as f64 / (self.replicates.len() + 1) as f64
    }

    /// p-value of the reversed comparison (B better than A) on the same
    /// replicates.
    pub fn reversed_p_value(&self) -> f64 {
        let hits = self.replicates.iter().filter(|&&d| -d >= -self.observed).count();
        (1 + hits) as f64 / (self.replicates.len() + 1) as f64
    }
}

fn delta(a: &[f64], b: &[f64], human: &[f64]) -> Result<f64> {
    Ok(kendall_tau_b(a, human)?.value - kendall_tau_b(b, human)?.value)
}

/// Permutation distribution over aligned vectors.
pub fn perm_both_vectors(a: &[f64], b: &[f64], human: &[f64], replicates: usize, seed: u64) -> Result<PermutationOutcome> {
    if a.len() != b.len() || a.len() != human.len() {
        return Err(Error::CellMismatch(format!(
            "{} / {} / {} cells",
            a.len(),
            b.len(),
            human.len()
        )));
    }
    let observed = delta(a, b, human)?;
    let replicates = (0..replicates)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, "perm", i as u64);
            let mut pa = a.to_vec();
            let mut pb = b.to_vec();
            for (x, y) in pa.iter_mut().zip(pb.iter_mut()) {
                if rng.random_bool(0.5) {
                    std::mem::swap(x, y);
                }
            }
            delta(&pa, &pb, human)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(PermutationOutcome { observed, replicates })
}

/// Checks that both tables cover the same cells, then pools them.
pub fn aligned_vectors(
    a: &ScoreTable,
    b: &ScoreTable,
    human_cells: &BTreeMap<CellKey, f64>,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let ka: Vec<&CellKey> = a.segment_cells()?.keys().collect();
    let kb: Vec<&CellKey> = b.segment_cells()?.keys().collect();
    if ka != kb {
        return Err(Error::CellMismatch(format!("{} vs {}", a.name(), b.name())));
    }
    let (va, human) = pooled_pairs(a, human_cells)?;
    let (vb, _) = pooled_pairs(b, human_cells)?;
    Ok((va, vb, human))
}

/// One-sided PERM-BOTH p-value that table `a` correlates better with the
/// human scores than table `b`.
pub fn perm_both(
    a: &ScoreTable,
    b: &ScoreTable,
    human_cells: &BTreeMap<CellKey, f64>,
    replicates: usize,
    seed: u64,
) -> Result<f64> {
    let (va, vb, human) = aligned_vectors(a, b, human_cells)?;
    Ok(perm_both_vectors(&va, &vb, &human, replicates, seed)?.p_value())
}
