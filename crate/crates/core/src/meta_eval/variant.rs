//! Choosing the best variant (layer, measurement type, ...) of a metric that
//! comes in many variants.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::meta_eval::correlation::pearson;
use crate::meta_eval::hybrid::{hybrid_supersample, MetricSource};
use crate::meta_eval::segment::segment_correlation;
use crate::meta_eval::table::ScoreTable;
use crate::ratings::HumanScores;
use crate::seed::derive_seed;
use crate::task::Task;

/// Correlation level used for selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Level {
    /// Pearson over real plus `hybrids` hybrid systems.
    System { hybrids: usize, seed: u64 },
    /// Kendall tau-b over pooled segment cells.
    Segment,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariantScore {
    pub variant_id: String,
    pub per_task: Vec<(Task, f64)>,
    pub average: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariantSelection {
    pub metric_id: String,
    pub chosen: VariantScore,
    /// Every candidate, ordered by variant id.
    pub candidates: Vec<VariantScore>,
}

/// Seed for the hybrids of one task, shared by every metric so that all
/// metrics are compared on the same hybrid systems.
pub fn task_hybrid_seed(master: u64, task: &Task) -> u64 {
    derive_seed(master, &format!("hybrid:{task}"), 0)
}

/// Correlation of one table with the human scores of its task.
pub fn table_correlation(table: &ScoreTable, human: &HumanScores, level: Level) -> Result<f64> {
    let cells = human.task(&table.task)?;
    match level {
        Level::Segment => Ok(segment_correlation(table, cells)?.value),
        Level::System { hybrids, seed } => {
            let out = hybrid_supersample(
                &table.task,
                &[MetricSource::Segment(table)],
                cells,
                hybrids,
                task_hybrid_seed(seed, &table.task),
            )?;
            Ok(pearson(&out.metrics[0].1, &out.human)?.value)
        }
    }
}

/// Picks the variant with the highest unweighted mean correlation over the
/// tasks; ties go to the lexicographically smallest variant id.
pub fn select_from_correlations(
    metric_id: &str,
    correlations: BTreeMap<String, Vec<(Task, f64)>>,
) -> Result<VariantSelection> {
    let candidates: Vec<VariantScore> = correlations
        .into_iter()
        .map(|(variant_id, per_task)| {
            let average = per_task.iter().map(|(_, r)| r).sum::<f64>() / per_task.len() as f64;
            VariantScore {
                variant_id,
                per_task,
                average,
            }
        })
        .collect();
    let mut best: Option<&VariantScore> = None;
    for c in &candidates {
        if best.is_none_or(|b| c.average > b.average) {
            best = Some(c);
        }
    }
    let chosen = best.ok_or(Error::NoVariants)?.clone();
    Ok(VariantSelection {
        metric_id: metric_id.to_string(),
        chosen,
        candidates,
    })
}

/// Selects among `tables` (all variants of one metric, across tasks).
pub fn select_best_variant(
    tables: &[&ScoreTable],
    human: &HumanScores,
    tasks: &[Task],
    level: Level,
) -> Result<VariantSelection> {
    let metric_id = tables.first().ok_or(Error::NoVariants)?.metric_id.clone();
    let mut by_variant: BTreeMap<&str, BTreeMap<&Task, &ScoreTable>> = BTreeMap::new();
    for t in tables {
        by_variant.entry(&t.variant_id).or_default().insert(&t.task, t);
    }
    let mut correlations = BTreeMap::new();
    for (variant, per_task) in by_variant {
        let mut values = Vec::with_capacity(tasks.len());
        for task in tasks {
            let table = per_task
                .get(task)
                .ok_or_else(|| Error::MissingKey(format!("{metric_id}/{variant} has no table for {task}")))?;
            values.push((task.clone(), table_correlation(table, human, level)?));
        }
        correlations.insert(variant.to_string(), values);
    }
    select_from_correlations(&metric_id, correlations)
}
