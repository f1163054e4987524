//! Pairwise metric comparison grids at system and segment level.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::meta_eval::correlation::pearson;
use crate::meta_eval::table::{CellKey, ScoreTable};
use crate::seed::derive_seed;
use crate::significance::perm::{aligned_vectors, perm_both_vectors};
use crate::significance::zou::{zou_ci, CIResult};
use crate::task::Task;

pub const DEFAULT_ALPHA: f64 = 0.05;

const CORRELATION_CLAMP: f64 = 1.0 - 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigLevel {
    System,
    Segment,
}

impl SigLevel {
    pub fn as_str(self) -> &'static str {
        match self {
            SigLevel::System => "system",
            SigLevel::Segment => "segment",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    Interval(CIResult),
    PValue(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigCell {
    pub row_metric: String,
    pub col_metric: String,
    pub statistic: Statistic,
    pub significant: bool,
    pub bonferroni_significant: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigMatrix {
    pub task: Task,
    pub level: SigLevel,
    pub metrics: Vec<String>,
    /// Row-major over ordered pairs, diagonal omitted.
    pub cells: Vec<SigCell>,
}

impl SigMatrix {
    /// Cell for the ordered pair of metric positions `(row, col)`, `row != col`.
    pub fn cell(&self, row: usize, col: usize) -> Option<&SigCell> {
        let k = self.metrics.len();
        if row >= k || col >= k || row == col {
            return None;
        }
        let offset = if col > row { col - 1 } else { col };
        self.cells.get(row * (k - 1) + offset)
    }

    pub fn is_complete(&self) -> bool {
        let k = self.metrics.len();
        self.cells.len() == k * k.saturating_sub(1)
            && (0..k).all(|i| {
                (0..k).filter(|&j| j != i).all(|j| {
                    self.cell(i, j).is_some_and(|c| {
                        c.row_metric == self.metrics[i] && c.col_metric == self.metrics[j]
                    })
                })
            })
    }

    pub fn win_count(&self) -> usize {
        self.cells.iter().filter(|c| c.significant).count()
    }
}

/// Flags `p < alpha / m` with `m` the number of p-values.
pub fn bonferroni(pvals: &[f64], alpha: f64) -> Vec<bool> {
    let m = pvals.len() as f64;
    pvals.iter().map(|&p| p < alpha / m).collect()
}

fn ordered_pairs(k: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..k).flat_map(move |i| (0..k).filter(move |&j| j != i).map(move |j| (i, j)))
}

/// Zou intervals for every ordered metric pair. `metrics` holds one
/// system-level score vector per metric, aligned with `human`.
pub fn system_sig_matrix(task: &Task, metrics: &[(String, Vec<f64>)], human: &[f64], level: f64) -> Result<SigMatrix> {
    let n = human.len();
    let clamp = |r: f64| r.clamp(-CORRELATION_CLAMP, CORRELATION_CLAMP);
    let with_human = metrics
        .iter()
        .map(|(_, v)| pearson(v, human).map(|c| clamp(c.value)))
        .collect::<Result<Vec<f64>>>()?;
    let k = metrics.len();
    let mut between = vec![vec![1.0; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let r = pearson(&metrics[i].1, &metrics[j].1)?.value;
            between[i][j] = r;
            between[j][i] = r;
        }
    }
    let cells = ordered_pairs(k)
        .map(|(i, j)| {
            let ci = zou_ci(with_human[i], with_human[j], between[i][j], n, level)?;
            Ok(SigCell {
                row_metric: metrics[i].0.clone(),
                col_metric: metrics[j].0.clone(),
                statistic: Statistic::Interval(ci),
                significant: ci.lower > 0.0,
                bonferroni_significant: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SigMatrix {
        task: task.clone(),
        level: SigLevel::System,
        metrics: metrics.iter().map(|(m, _)| m.clone()).collect(),
        cells,
    })
}

/// Seed shared by both orderings of a metric pair.
pub fn pair_seed(master: u64, task: &Task, i: usize, j: usize) -> u64 {
    let (lo, hi) = if i < j { (i, j) } else { (j, i) };
    derive_seed(master, &format!("perm:{task}"), ((lo as u64) << 32) | hi as u64)
}

/// PERM-BOTH p-values for every ordered pair of segment-level tables.
/// Metric labels are the tables' metric ids.
pub fn segment_sig_matrix(
    tables: &[&ScoreTable],
    human_cells: &BTreeMap<CellKey, f64>,
    replicates: usize,
    seed: u64,
    alpha: f64,
) -> Result<SigMatrix> {
    let task = tables
        .first()
        .map(|t| t.task.clone())
        .ok_or(Error::EmptySet("metric tables"))?;
    if let Some(t) = tables.iter().find(|t| t.task != task) {
        return Err(Error::CellMismatch(format!("{} is for task {}, not {task}", t.name(), t.task)));
    }
    let k = tables.len();
    let mut pvals = vec![vec![f64::NAN; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let (a, b, human) = aligned_vectors(tables[i], tables[j], human_cells)?;
            let outcome = perm_both_vectors(&a, &b, &human, replicates, pair_seed(seed, &task, i, j))?;
            pvals[i][j] = outcome.p_value();
            pvals[j][i] = outcome.reversed_p_value();
        }
    }
    let flat: Vec<f64> = ordered_pairs(k).map(|(i, j)| pvals[i][j]).collect();
    let corrected = bonferroni(&flat, alpha);
    let cells = ordered_pairs(k)
        .zip(corrected)
        .map(|((i, j), bonf)| SigCell {
            row_metric: tables[i].metric_id.clone(),
            col_metric: tables[j].metric_id.clone(),
            statistic: Statistic::PValue(pvals[i][j]),
            significant: pvals[i][j] < alpha,
            bonferroni_significant: Some(bonf),
        })
        .collect();
    Ok(SigMatrix {
        task,
        level: SigLevel::Segment,
        metrics: tables.iter().map(|t| t.metric_id.clone()).collect(),
        cells,
    })
}
