use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::Result;
use crate::meta_eval::table::{Cells, ScoreTable};
use crate::task::Task;

/// System-level scores of one metric variant (or of the human ratings).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemScoreVector {
    pub task: Task,
    pub scores: BTreeMap<String, f64>,
}

/// Per-system mean of segment scores; system-only tables pass through.
pub fn system_scores(table: &ScoreTable) -> Result<SystemScoreVector> {
    let scores = match &table.cells {
        Cells::System(s) => s.clone(),
        Cells::Segment(cells) => {
            let systems: Vec<&str> = table.systems().into_iter().collect();
            let segments: Vec<&str> = table.segments().into_iter().collect();
            table.check_dense(&systems, &segments)?;
            let mut sums: BTreeMap<String, (f64, usize)> = BTreeMap::new();
            for ((system, _), v) in cells {
                let e = sums.entry(system.clone()).or_insert((0.0, 0));
                e.0 += v;
                e.1 += 1;
            }
            sums.into_iter().map(|(s, (sum, n))| (s, sum / n as f64)).collect()
        }
    };
    Ok(SystemScoreVector {
        task: table.task.clone(),
        scores,
    })
}
