//! Per-annotator z-normalization and aggregation into human segment scores.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::corpus::RatingRecord;
use crate::error::{Error, Result};
use crate::meta_eval::table::CellKey;
use crate::task::Task;

#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedRating {
    pub record: RatingRecord,
    pub z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroupStats {
    pub mean: f64,
    /// Population standard deviation.
    pub std_dev: f64,
}

fn group_stats(values: &[f64]) -> Option<GroupStats> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (var > 0.0).then(|| GroupStats {
        mean,
        std_dev: var.sqrt(),
    })
}

/// Standardizes each annotator's raw scores within each task. Trap ratings
/// contribute to the mean and deviation, and appear in the output, only when
/// `include_traps` is set. Output order follows the input.
pub fn znormalize(ratings: &[RatingRecord], include_traps: bool) -> Result<Vec<NormalizedRating>> {
    let kept: Vec<&RatingRecord> = ratings.iter().filter(|r| include_traps || !r.is_trap).collect();
    let mut groups: BTreeMap<(&str, &Task), Vec<f64>> = BTreeMap::new();
    for r in &kept {
        groups
            .entry((r.annotator_id.as_str(), &r.task))
            .or_default()
            .push(f64::from(r.raw_score));
    }
    let mut stats = BTreeMap::new();
    for (key, values) in groups {
        let s = group_stats(&values)
            .ok_or_else(|| Error::ZeroVariance(format!("annotator {} in task {}", key.0, key.1)))?;
        stats.insert(key, s);
    }
    Ok(kept
        .into_iter()
        .map(|r| {
            let s = stats[&(r.annotator_id.as_str(), &r.task)];
            NormalizedRating {
                record: r.clone(),
                z: (f64::from(r.raw_score) - s.mean) / s.std_dev,
            }
        })
        .collect())
}

/// Human segment scores: mean z per `(task, system, segment)` over annotators.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct HumanScores {
    pub scores: BTreeMap<Task, BTreeMap<CellKey, f64>>,
    pub rating_counts: BTreeMap<Task, BTreeMap<CellKey, usize>>,
    pub warnings: Vec<String>,
}

impl HumanScores {
    pub fn task(&self, task: &Task) -> Result<&BTreeMap<CellKey, f64>> {
        self.scores
            .get(task)
            .ok_or_else(|| Error::MissingKey(format!("no human scores for task {task}")))
    }

    pub fn get(&self, task: &Task, system: &str, seg_id: &str) -> Result<f64> {
        self.task(task)?
            .get(&(system.to_string(), seg_id.to_string()))
            .copied()
            .ok_or_else(|| Error::MissingKey(format!("no human score for {task} {system} {seg_id}")))
    }

    /// Systems and segments covered in a task, each sorted.
    pub fn axes(&self, task: &Task) -> Result<(Vec<String>, Vec<String>)> {
        let cells = self.task(task)?;
        let systems: BTreeSet<&String> = cells.keys().map(|(s, _)| s).collect();
        let segs: BTreeSet<&String> = cells.keys().map(|(_, g)| g).collect();
        Ok((
            systems.into_iter().cloned().collect(),
            segs.into_iter().cloned().collect(),
        ))
    }
}

/// Averages z-scores of non-trap ratings per `(task, system, segment)`.
/// Cells rated by fewer than `annotators_per_task` annotators are kept and
/// produce a warning.
pub fn aggregate_segment_human(normalized: &[NormalizedRating], annotators_per_task: usize) -> HumanScores {
    let mut sums: BTreeMap<Task, BTreeMap<CellKey, (f64, usize)>> = BTreeMap::new();
    for n in normalized.iter().filter(|n| !n.record.is_trap) {
        let entry = sums
            .entry(n.record.task.clone())
            .or_default()
            .entry((n.record.system_id.clone(), n.record.seg_id.clone()))
            .or_insert((0.0, 0));
        entry.0 += n.z;
        entry.1 += 1;
    }
    let mut out = HumanScores::default();
    for (task, cells) in sums {
        let mut scores = BTreeMap::new();
        let mut counts = BTreeMap::new();
        for (key, (sum, count)) in cells {
            if count < annotators_per_task {
                out.warnings.push(format!(
                    "{task} {} {}: {count} of {annotators_per_task} ratings",
                    key.0, key.1
                ));
            }
            scores.insert(key.clone(), sum / count as f64);
            counts.insert(key, count);
        }
        out.scores.insert(task.clone(), scores);
        out.rating_counts.insert(task, counts);
    }
    out
}
