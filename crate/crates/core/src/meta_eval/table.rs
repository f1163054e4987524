use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::task::Task;

/// `(system_id, seg_id)`
pub type CellKey = (String, String);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScoreLevel {
    Segment,
    SystemOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cells {
    Segment(BTreeMap<CellKey, f64>),
    System(BTreeMap<String, f64>),
}

/// Scores of one metric variant for one task.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    pub metric_id: String,
    pub variant_id: String,
    pub task: Task,
    pub cells: Cells,
}

impl ScoreTable {
    pub fn segment(
        metric_id: impl Into<String>,
        variant_id: impl Into<String>,
        task: Task,
        cells: BTreeMap<CellKey, f64>,
    ) -> Self {
        ScoreTable {
            metric_id: metric_id.into(),
            variant_id: variant_id.into(),
            task,
            cells: Cells::Segment(cells),
        }
    }

    pub fn system_only(
        metric_id: impl Into<String>,
        variant_id: impl Into<String>,
        task: Task,
        scores: BTreeMap<String, f64>,
    ) -> Self {
        ScoreTable {
            metric_id: metric_id.into(),
            variant_id: variant_id.into(),
            task,
            cells: Cells::System(scores),
        }
    }

    pub fn level(&self) -> ScoreLevel {
        match self.cells {
            Cells::Segment(_) => ScoreLevel::Segment,
            Cells::System(_) => ScoreLevel::SystemOnly,
        }
    }

    /// `metric/variant`, used in error messages and report rows.
    pub fn name(&self) -> String {
        format!("{}/{}", self.metric_id, self.variant_id)
    }

    pub fn segment_cells(&self) -> Result<&BTreeMap<CellKey, f64>> {
        match &self.cells {
            Cells::Segment(c) => Ok(c),
            Cells::System(_) => Err(Error::SystemOnlyTable(self.name())),
        }
    }

    pub fn systems(&self) -> BTreeSet<&str> {
        match &self.cells {
            Cells::Segment(c) => c.keys().map(|(s, _)| s.as_str()).collect(),
            Cells::System(c) => c.keys().map(String::as_str).collect(),
        }
    }

    pub fn segments(&self) -> BTreeSet<&str> {
        match &self.cells {
            Cells::Segment(c) => c.keys().map(|(_, g)| g.as_str()).collect(),
            Cells::System(_) => BTreeSet::new(),
        }
    }

    pub fn get(&self, system: &str, seg_id: &str) -> Option<f64> {
        match &self.cells {
            Cells::Segment(c) => c.get(&(system.to_string(), seg_id.to_string())).copied(),
            Cells::System(_) => None,
        }
    }

    /// Checks that every `(system, segment)` cell is present and finite.
    pub fn check_dense<S: AsRef<str>, G: AsRef<str>>(&self, systems: &[S], segments: &[G]) -> Result<()> {
        match &self.cells {
            Cells::Segment(c) => {
                for s in systems {
                    for g in segments {
                        let key = (s.as_ref().to_string(), g.as_ref().to_string());
                        match c.get(&key) {
                            Some(v) if v.is_finite() => {}
                            _ => {
                                return Err(Error::IncompleteTable {
                                    table: self.name(),
                                    system: key.0,
                                    seg_id: key.1,
                                })
                            }
                        }
                    }
                }
            }
            Cells::System(c) => {
                for s in systems {
                    match c.get(s.as_ref()) {
                        Some(v) if v.is_finite() => {}
                        _ => {
                            return Err(Error::IncompleteTable {
                                table: self.name(),
                                system: s.as_ref().to_string(),
                                seg_id: String::new(),
                            })
                        }
                    }
                }
            }
        }
        Ok(())
    }
}
