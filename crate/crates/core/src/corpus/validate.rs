use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::corpus::campaign::Campaign;
use crate::task::Task;

/// A `(task, segment, system)` cell with fewer ratings than planned.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MissingCell {
    pub task: String,
    pub seg_id: String,
    pub system_id: String,
    pub found: usize,
    pub expected: usize,
}

/// The same annotator rated the same `(task, segment, system)` more than once.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DuplicateCell {
    pub annotator_id: String,
    pub task: String,
    pub seg_id: String,
    pub system_id: String,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub expected_rating_count: usize,
    pub found_rating_count: usize,
    pub missing_cells: Vec<MissingCell>,
    pub duplicate_cells: Vec<DuplicateCell>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.missing_cells.is_empty() && self.duplicate_cells.is_empty()
    }
}

/// Planned number of non-trap ratings:
/// directions × segments per direction × systems × ratios × annotators.
pub fn expected_rating_count(segments_per_direction: &[usize], systems: usize, ratios: usize, annotators: usize) -> usize {
    segments_per_direction
        .iter()
        .map(|&segs| segs * systems * ratios * annotators)
        .sum()
}

/// Checks the ratings actually present against the planned design. Trap
/// ratings are excluded from the cell accounting.
pub fn validate_campaign(campaign: &Campaign) -> ValidationReport {
    let config = &campaign.config;
    let per_direction: Vec<usize> = config
        .directions
        .iter()
        .map(|d| campaign.segment_ids(d).len())
        .collect();
    let expected_rating_count = expected_rating_count(
        &per_direction,
        config.systems.len(),
        config.length_ratios.len(),
        config.annotators_per_task,
    );

    let mut counts: BTreeMap<(Task, String, String, String), usize> = BTreeMap::new();
    let mut found = 0;
    for r in campaign.ratings.iter().filter(|r| !r.is_trap) {
        found += 1;
        *counts
            .entry((r.task.clone(), r.seg_id.clone(), r.system_id.clone(), r.annotator_id.clone()))
            .or_insert(0) += 1;
    }

    let mut annotators_per_cell: BTreeMap<(Task, String, String), usize> = BTreeMap::new();
    let mut duplicate_cells = Vec::new();
    for ((task, seg, sys, annotator), count) in &counts {
        *annotators_per_cell
            .entry((task.clone(), seg.clone(), sys.clone()))
            .or_insert(0) += 1;
        if *count > 1 {
            duplicate_cells.push(DuplicateCell {
                annotator_id: annotator.clone(),
                task: task.to_string(),
                seg_id: seg.clone(),
                system_id: sys.clone(),
                count: *count,
            });
        }
    }

    let mut missing_cells = Vec::new();
    let mut warnings = Vec::new();
    for task in config.tasks() {
        for seg in campaign.segment_ids(&task.direction) {
            for sys in &config.systems {
                let have = annotators_per_cell
                    .get(&(task.clone(), seg.clone(), sys.clone()))
                    .copied()
                    .unwrap_or(0);
                if have < config.annotators_per_task {
                    missing_cells.push(MissingCell {
                        task: task.to_string(),
                        seg_id: seg.clone(),
                        system_id: sys.clone(),
                        found: have,
                        expected: config.annotators_per_task,
                    });
                } else if have > config.annotators_per_task {
                    warnings.push(format!(
                        "{task} {seg} {sys}: {have} annotators, expected {}",
                        config.annotators_per_task
                    ));
                }
            }
        }
        let annotators: BTreeSet<&str> = campaign
            .ratings_for(&task)
            .iter()
            .map(|r| r.annotator_id.as_str())
            .collect();
        if !annotators.is_empty() && annotators.len() != config.annotators_per_task {
            warnings.push(format!(
                "{task}: {} distinct annotators, expected {}",
                annotators.len(),
                config.annotators_per_task
            ));
        }
    }

    ValidationReport {
        expected_rating_count,
        found_rating_count: found,
        missing_cells,
        duplicate_cells,
        warnings,
    }
}
