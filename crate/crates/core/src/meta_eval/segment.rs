use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::meta_eval::correlation::{kendall_tau_b, CorrelationResult};
use crate::meta_eval::table::{CellKey, ScoreTable};

/// Metric and human scores over every `(system, segment)` cell of the table,
/// in cell-key order.
pub fn pooled_pairs(table: &ScoreTable, human_cells: &BTreeMap<CellKey, f64>) -> Result<(Vec<f64>, Vec<f64>)> {
    let cells = table.segment_cells()?;
    let mut metric = Vec::with_capacity(cells.len());
    let mut human = Vec::with_capacity(cells.len());
    for (key, &v) in cells {
        let h = human_cells
            .get(key)
            .ok_or_else(|| Error::MissingKey(format!("no human score for {} {}", key.0, key.1)))?;
        metric.push(v);
        human.push(*h);
    }
    Ok((metric, human))
}

/// Kendall tau-b between metric and human scores, pooling all
/// `(system, segment)` pairs of the task into one vector.
pub fn segment_correlation(table: &ScoreTable, human_cells: &BTreeMap<CellKey, f64>) -> Result<CorrelationResult> {
    let (metric, human) = pooled_pairs(table, human_cells)?;
    kendall_tau_b(&metric, &human)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::task::Task;

    fn task() -> Task {
        "zh-en@0.5".parse().unwrap()
    }

    fn human() -> BTreeMap<CellKey, f64> {
        [("a", "1", 0.3), ("a", "2", -0.2), ("a", "3", 1.1), ("b", "1", 0.0), ("b", "2", -1.0), ("b", "3", 0.3)]
            .iter()
            .map(|&(s, g, v)| ((s.to_string(), g.to_string()), v))
            .collect()
    }

    #[test]
    fn identity_is_one() {
        let t = ScoreTable::segment("m", "v", task(), human());
        assert_eq!(segment_correlation(&t, &human()).unwrap().value, 1.0);
    }

    #[test]
    fn constant_metric_is_all_tied() {
        let t = ScoreTable::segment("m", "v", task(), human().into_keys().map(|k| (k, 0.5)).collect());
        assert!(matches!(segment_correlation(&t, &human()), Err(Error::AllTied)));
    }

    #[test]
    fn system_only_rejected() {
        let t = ScoreTable::system_only("BLEU", "corpus", task(), BTreeMap::new());
        assert!(matches!(segment_correlation(&t, &human()), Err(Error::SystemOnlyTable(_))));
    }

    #[test]
    fn pooled_six_pairs_brute_force() {
        let metric: BTreeMap<CellKey, f64> =
            [("a", "1", 2.0), ("a", "2", 1.0), ("a", "3", 3.0), ("b", "1", 1.0), ("b", "2", 0.0), ("b", "3", 2.0)]
                .iter()
                .map(|&(s, g, v)| ((s.to_string(), g.to_string()), v))
                .collect();
        let t = ScoreTable::segment("m", "v", task(), metric.clone());
        let x: Vec<f64> = metric.values().copied().collect();
        let y: Vec<f64> = human().values().copied().collect();
        let (mut c, mut d, mut tx, mut ty) = (0.0, 0.0, 0.0, 0.0);
        for i in 0..6 {
            for j in i + 1..6 {
                let dx = x[i] - x[j];
                let dy = y[i] - y[j];
                if dx == 0.0 && dy == 0.0 {
                } else if dx == 0.0 {
                    tx += 1.0;
                } else if dy == 0.0 {
                    ty += 1.0;
                } else if dx * dy > 0.0 {
                    c += 1.0;
                } else {
                    d += 1.0;
                }
            }
        }
        let expected = (c - d) / f64::sqrt((c + d + tx) * (c + d + ty));
        assert!((segment_correlation(&t, &human()).unwrap().value - expected).abs() < 1e-12);
    }
}
