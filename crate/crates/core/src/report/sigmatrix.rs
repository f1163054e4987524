//! Rendering significance matrices as CSV, a monospaced text grid or SVG.

use std::fmt::Write;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::report::table::{Cell, Kind, ReportTable};
use crate::significance::{CIResult, SigCell, SigLevel, SigMatrix, Statistic};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigFormat {
    Csv,
    Textgrid,
    Svg,
}

impl SigFormat {
    pub const ALL: [SigFormat; 3] = [SigFormat::Csv, SigFormat::Textgrid, SigFormat::Svg];

    pub fn extension(self) -> &'static str {
        match self {
            SigFormat::Csv => "csv",
            SigFormat::Textgrid => "txt",
            SigFormat::Svg => "svg",
        }
    }
}

impl FromStr for SigFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(SigFormat::Csv),
            "textgrid" | "txt" => Ok(SigFormat::Textgrid),
            "svg" => Ok(SigFormat::Svg),
            other => Err(Error::UnsupportedFormat(other.to_string())),
        }
    }
}

const SIG_COLUMNS: [(&str, Kind); 9] = [
    ("task", Kind::Text),
    ("level", Kind::Text),
    ("row_metric", Kind::Text),
    ("col_metric", Kind::Text),
    ("ci_lower", Kind::Real),
    ("ci_upper", Kind::Real),
    ("p_value", Kind::Real),
    ("significant", Kind::Flag),
    ("bonferroni_significant", Kind::Flag),
];

pub fn sig_table(matrix: &SigMatrix) -> ReportTable {
    let mut t = ReportTable::new(&SIG_COLUMNS);
    for c in &matrix.cells {
        let (lower, upper, p) = match c.statistic {
            Statistic::Interval(ci) => (Cell::Real(ci.lower), Cell::Real(ci.upper), Cell::Empty),
            Statistic::PValue(p) => (Cell::Empty, Cell::Empty, Cell::Real(p)),
        };
        t.push(vec![
            Cell::text(matrix.task.to_string()),
            Cell::text(matrix.level.as_str()),
            Cell::text(&c.row_metric),
            Cell::text(&c.col_metric),
            lower,
            upper,
            p,
            Cell::Flag(c.significant),
            c.bonferroni_significant.map_or(Cell::Empty, Cell::Flag),
        ]);
    }
    t
}

/// Loads a matrix written by [`emit_sig_matrix`] in CSV form. Numbers carry
/// the four decimals of the file.
pub fn load_sig_matrix_csv(text: &str, file: &str, level_ci: f64) -> Result<SigMatrix> {
    let table = ReportTable::parse(text, file, |header| {
        if header.iter().map(String::as_str).ne(SIG_COLUMNS.iter().map(|(c, _)| *c)) {
            return Err(Error::parse(file, 1, "not a significance matrix header"));
        }
        Ok(SIG_COLUMNS.iter().map(|(_, k)| *k).collect())
    })?;
    let first = table
        .rows
        .first()
        .ok_or_else(|| Error::parse(file, 2, "matrix has no cells"))?;
    let task = first[0].as_text().unwrap_or_default().parse()?;
    let level = match first[1].as_text() {
        Some("system") => SigLevel::System,
        Some("segment") => SigLevel::Segment,
        other => return Err(Error::parse(file, 2, format!("unknown level {other:?}"))),
    };
    let mut metrics: Vec<String> = Vec::new();
    let mut cells = Vec::with_capacity(table.rows.len());
    for (i, row) in table.rows.iter().enumerate() {
        let line = i + 2;
        let row_metric = row[2].as_text().unwrap_or_default().to_string();
        if !metrics.contains(&row_metric) {
            metrics.push(row_metric.clone());
        }
        let statistic = match (row[4].as_real(), row[5].as_real(), row[6].as_real()) {
            (Some(lower), Some(upper), None) => Statistic::Interval(CIResult {
                lower,
                upper,
                level: level_ci,
            }),
            (None, None, Some(p)) => Statistic::PValue(p),
            _ => return Err(Error::parse(file, line, "expected either an interval or a p-value")),
        };
        cells.push(SigCell {
            row_metric,
            col_metric: row[3].as_text().unwrap_or_default().to_string(),
            statistic,
            significant: row[7]
                .as_flag()
                .ok_or_else(|| Error::parse(file, line, "missing significant flag"))?,
            bonferroni_significant: row[8].as_flag(),
        });
    }
    let matrix = SigMatrix {
        task,
        level,
        metrics,
        cells,
    };
    if !matrix.is_complete() {
        return Err(Error::parse(file, 1, "matrix does not cover every ordered metric pair"));
    }
    Ok(matrix)
}

fn grid_symbol(cell: &SigCell) -> &'static str {
    match (cell.significant, cell.bonferroni_significant) {
        (true, Some(true)) => "b",
        (true, _) => "W",
        _ => "·",
    }
}

fn textgrid(matrix: &SigMatrix) -> String {
    let k = matrix.metrics.len();
    let label_w = matrix.metrics.iter().map(|m| m.chars().count()).max().unwrap_or(0);
    let idx_w = k.saturating_sub(1).to_string().len().max(1);
    let mut out = format!("# {} {}\n", matrix.task, matrix.level.as_str());
    let _ = write!(out, "{:w$}  {:lw$} ", "", "", w = idx_w, lw = label_w);
    for j in 0..k {
        let _ = write!(out, " {j:>idx_w$}");
    }
    out.push('\n');
    for (i, label) in matrix.metrics.iter().enumerate() {
        let pad = label_w - label.chars().count();
        let _ = write!(out, "{i:>idx_w$}  {label}{} ", " ".repeat(pad));
        for j in 0..k {
            let sym = if i == j {
                "-"
            } else {
                matrix.cell(i, j).map_or("?", grid_symbol)
            };
            let _ = write!(out, " {sym:>idx_w$}");
        }
        out.push('\n');
    }
    out
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

const CELL: usize = 22;
const CHAR_W: usize = 7;

fn svg(matrix: &SigMatrix) -> String {
    let k = matrix.metrics.len();
    let label_w = matrix.metrics.iter().map(|m| m.chars().count()).max().unwrap_or(0) * CHAR_W + 10;
    let top = label_w;
    let width = label_w + k * CELL + 10;
    let height = top + k * CELL + 10;
    let win_fill = match matrix.level {
        SigLevel::System => "#2ca02c",
        SigLevel::Segment => "#1f77b4",
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="monospace" font-size="11">"#
    );
    let _ = writeln!(
        out,
        r#"<title>{} {}</title>"#,
        xml_escape(&matrix.task.to_string()),
        matrix.level.as_str()
    );
    for (i, m) in matrix.metrics.iter().enumerate() {
        let y = top + i * CELL + CELL / 2 + 4;
        let _ = writeln!(
            out,
            r#"<text class="row-label" x="{}" y="{y}" text-anchor="end">{}</text>"#,
            label_w - 4,
            xml_escape(m)
        );
        let x = label_w + i * CELL + CELL / 2 + 4;
        let _ = writeln!(
            out,
            r#"<text class="col-label" x="{x}" y="{}" text-anchor="start" transform="rotate(-90 {x} {})">{}</text>"#,
            top - 4,
            top - 4,
            xml_escape(m)
        );
    }
    for i in 0..k {
        for j in 0..k {
            let x = label_w + j * CELL;
            let y = top + i * CELL;
            if i == j {
                let _ = writeln!(
                    out,
                    r##"<rect class="diagonal" x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="#d9d9d9"/>"##
                );
                continue;
            }
            let Some(cell) = matrix.cell(i, j) else { continue };
            let fill = if cell.significant { win_fill } else { "#ffffff" };
            let stroke = if cell.bonferroni_significant == Some(true) {
                r##"stroke="#ff7f0e" stroke-width="3""##
            } else {
                r##"stroke="#bfbfbf" stroke-width="1""##
            };
            let _ = writeln!(
                out,
                r#"<rect class="cell" x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{fill}" {stroke}><title>{} vs {}</title></rect>"#,
                xml_escape(&cell.row_metric),
                xml_escape(&cell.col_metric)
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

pub fn emit_sig_matrix(matrix: &SigMatrix, format: SigFormat) -> String {
    match format {
        SigFormat::Csv => sig_table(matrix).to_csv(),
        SigFormat::Textgrid => textgrid(matrix),
        SigFormat::Svg => svg(matrix),
    }
}
