//! Loaders for the report files written by the pipeline.

use crate::error::{Error, Result};
use crate::report::table::{Kind, ReportTable};

fn fixed(file: &str, header: &[String], columns: &[(&str, Kind)]) -> Result<Vec<Kind>> {
    if header.iter().map(String::as_str).ne(columns.iter().map(|(c, _)| *c)) {
        return Err(Error::parse(file, 1, format!("unexpected header {header:?}")));
    }
    Ok(columns.iter().map(|(_, k)| *k).collect())
}

/// Fixed leading columns followed by any number of real-valued columns.
fn prefixed(file: &str, header: &[String], lead: &[(&str, Kind)]) -> Result<Vec<Kind>> {
    if header.len() < lead.len() || header.iter().zip(lead).any(|(h, (c, _))| h != c) {
        return Err(Error::parse(file, 1, format!("unexpected header {header:?}")));
    }
    let mut kinds: Vec<Kind> = lead.iter().map(|(_, k)| *k).collect();
    kinds.extend(std::iter::repeat_n(Kind::Real, header.len() - lead.len()));
    Ok(kinds)
}

/// Parses a report CSV, choosing the column layout from the file name.
pub fn load_report_table(file_name: &str, text: &str) -> Result<ReportTable> {
    use Kind::*;
    let f = file_name;
    ReportTable::parse(text, f, |h| match f {
        "qc_timing.csv" => fixed(
            f,
            h,
            &[("direction", Text), ("ratio", Text), ("all_ave", Real), ("cut_ave", Real), ("annotations", Count)],
        ),
        "qc_traps.csv" => fixed(
            f,
            h,
            &[("direction", Text), ("ratio", Text), ("zero", Count), ("low", Count), ("high", Count), ("total", Count)],
        ),
        "agreement.csv" => fixed(
            f,
            h,
            &[
                ("direction", Text),
                ("ratio", Text),
                ("scale", Text),
                ("pearson_with_traps", Real),
                ("pearson_without_traps", Real),
                ("alpha_with_traps", Real),
                ("alpha_without_traps", Real),
                ("items_with_traps", Count),
                ("items_without_traps", Count),
            ],
        ),
        "correlations_system.csv" | "correlations_segment.csv" => prefixed(f, h, &[("metric", Text), ("variant", Text)]),
        "variant_selection.csv" => prefixed(
            f,
            h,
            &[("metric", Text), ("variant", Text), ("level", Text), ("chosen", Flag)],
        ),
        "system_eval.csv" => fixed(
            f,
            h,
            &[
                ("metric", Text),
                ("variant", Text),
                ("task", Text),
                ("system", Text),
                ("score", Real),
                ("p_value", Real),
                ("mark", Text),
            ],
        ),
        "length_deviation.csv" => prefixed(f, h, &[("system", Text)]),
        "human_scores.csv" => fixed(
            f,
            h,
            &[("task", Text), ("system", Text), ("seg_id", Text), ("z", Real), ("ratings", Count)],
        ),
        "native_system_scores.csv" => fixed(
            f,
            h,
            &[("metric", Text), ("variant", Text), ("task", Text), ("system", Text), ("score", Real)],
        ),
        _ => Err(Error::UnsupportedFormat(format!("no loader for {f}"))),
    })
}
