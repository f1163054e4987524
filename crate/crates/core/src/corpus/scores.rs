//! `scores.tsv`: externally computed metric scores.
//!
//! Header `metric\tvariant\tsystem\tseg_id\tscore`. No quoting; a field can
//! never contain a tab.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::meta_eval::table::{CellKey, ScoreTable};
use crate::task::Task;

pub const SCORES_HEADER: [&str; 5] = ["metric", "variant", "system", "seg_id", "score"];

/// Parses a score file for one task. Returns one dense table per
/// `(metric, variant)`, ordered by metric then variant.
pub fn load_external_scores<S: AsRef<str>>(
    path: &Path,
    task: &Task,
    segments: &BTreeSet<String>,
    systems: &[S],
) -> Result<Vec<ScoreTable>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_external_scores(&text, path, task, segments, systems)
}

pub fn parse_external_scores<S: AsRef<str>>(
    text: &str,
    path: &Path,
    task: &Task,
    segments: &BTreeSet<String>,
    systems: &[S],
) -> Result<Vec<ScoreTable>> {
    let mut lines = text.lines().enumerate();
    let header = lines.next().map(|(_, l)| l).unwrap_or("");
    if header.split('\t').collect::<Vec<_>>() != SCORES_HEADER {
        return Err(Error::parse(path, 1, format!("expected header `{}`", SCORES_HEADER.join("\\t"))));
    }
    let mut tables: BTreeMap<(String, String), BTreeMap<CellKey, f64>> = BTreeMap::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 5 {
            return Err(Error::parse(
                path,
                line_no,
                format!("expected 5 tab-separated fields, found {}", fields.len()),
            ));
        }
        let [metric, variant, system, seg_id, score] = [fields[0], fields[1], fields[2], fields[3], fields[4]];
        if metric.is_empty() || variant.is_empty() {
            return Err(Error::parse(path, line_no, "empty metric or variant"));
        }
        if !systems.iter().any(|s| s.as_ref() == system) {
            return Err(Error::UnresolvedReference {
                file: path.into(),
                line: line_no,
                kind: "system",
                id: system.to_string(),
            });
        }
        if !segments.contains(seg_id) {
            return Err(Error::UnknownSegment {
                file: path.into(),
                line: line_no,
                seg_id: seg_id.to_string(),
            });
        }
        let value: f64 = score
            .trim()
            .parse()
            .map_err(|_| Error::parse(path, line_no, format!("bad score `{score}`")))?;
        if !value.is_finite() {
            return Err(Error::NonFiniteScore {
                file: path.into(),
                line: line_no,
                value: score.to_string(),
            });
        }
        let cells = tables.entry((metric.to_string(), variant.to_string())).or_default();
        if cells.insert((system.to_string(), seg_id.to_string()), value).is_some() {
            return Err(Error::DuplicateCell {
                table: format!("{metric}/{variant}"),
                system: system.to_string(),
                seg_id: seg_id.to_string(),
            });
        }
    }
    let segments: Vec<&String> = segments.iter().collect();
    tables
        .into_iter()
        .map(|((metric, variant), cells)| {
            let table = ScoreTable::segment(metric, variant, task.clone(), cells);
            table.check_dense(systems, &segments)?;
            Ok(table)
        })
        .collect()
}

/// Serializes segment-level tables in the `scores.tsv` format. Scores use
/// the shortest representation that parses back to the same value.
pub fn write_external_scores(tables: &[ScoreTable]) -> Result<String> {
    let mut out = SCORES_HEADER.join("\t");
    out.push('\n');
    for table in tables {
        for ((system, seg_id), value) in table.segment_cells()? {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                table.metric_id, table.variant_id, system, seg_id, value
            );
        }
    }
    Ok(out)
}
