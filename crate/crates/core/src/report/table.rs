//! Typed CSV report tables with fixed formatting: `.` decimal separator,
//! four decimals for reals, LF line endings.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Text,
    Real,
    Count,
    Flag,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Real(f64),
    Count(u64),
    Flag(bool),
    Empty,
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Cell {
        Cell::Text(s.into())
    }

    pub fn real_opt(v: Option<f64>) -> Cell {
        v.map_or(Cell::Empty, Cell::Real)
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_real(&self) -> Option<f64> {
        match self {
            Cell::Real(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_count(&self) -> Option<u64> {
        match self {
            Cell::Count(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_flag(&self) -> Option<bool> {
        match self {
            Cell::Flag(v) => Some(*v),
            _ => None,
        }
    }
}

/// Four decimals; negative zero prints as `0.0000`.
pub fn fmt4(v: f64) -> String {
    let s = format!("{v:.4}");
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Text(s) => f.write_str(s),
            Cell::Real(v) => f.write_str(&fmt4(*v)),
            Cell::Count(v) => write!(f, "{v}"),
            Cell::Flag(v) => write!(f, "{v}"),
            Cell::Empty => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportTable {
    pub header: Vec<String>,
    pub kinds: Vec<Kind>,
    pub rows: Vec<Vec<Cell>>,
}

impl ReportTable {
    pub fn new(columns: &[(&str, Kind)]) -> Self {
        ReportTable {
            header: columns.iter().map(|(c, _)| c.to_string()).collect(),
            kinds: columns.iter().map(|(_, k)| *k).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_columns(header: Vec<String>, kinds: Vec<Kind>) -> Self {
        assert_eq!(header.len(), kinds.len());
        ReportTable {
            header,
            kinds,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.to_string())).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }

    /// Parses `text` with the column kinds given by `kinds_for(header)`.
    pub fn parse(text: &str, file: &str, kinds_for: impl FnOnce(&[String]) -> Result<Vec<Kind>>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
        let header: Vec<String> = rdr
            .headers()
            .map_err(|e| Error::parse(file, 1, e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        let kinds = kinds_for(&header)?;
        if kinds.len() != header.len() {
            return Err(Error::parse(file, 1, format!("expected {} columns, found {}", kinds.len(), header.len())));
        }
        let mut table = ReportTable::with_columns(header, kinds);
        for (i, record) in rdr.records().enumerate() {
            let line = i + 2;
            let record = record.map_err(|e| Error::parse(file, line, e.to_string()))?;
            if record.len() != table.kinds.len() {
                return Err(Error::parse(file, line, format!("expected {} fields, found {}", table.kinds.len(), record.len())));
            }
            let row = record
                .iter()
                .zip(&table.kinds)
                .map(|(field, kind)| parse_cell(field, *kind).map_err(|msg| Error::parse(file, line, msg)))
                .collect::<Result<Vec<Cell>>>()?;
            table.rows.push(row);
        }
        Ok(table)
    }
}

fn parse_cell(field: &str, kind: Kind) -> std::result::Result<Cell, String> {
    if field.is_empty() && kind != Kind::Text {
        return Ok(Cell::Empty);
    }
    match kind {
        Kind::Text => Ok(Cell::Text(field.to_string())),
        Kind::Real => field
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .map(Cell::Real)
            .ok_or_else(|| format!("`{field}` is not a finite number")),
        Kind::Count => field
            .parse::<u64>()
            .map(Cell::Count)
            .map_err(|_| format!("`{field}` is not a count")),
        Kind::Flag => match field {
            "true" => Ok(Cell::Flag(true)),
            "false" => Ok(Cell::Flag(false)),
            _ => Err(format!("`{field}` is not true/false")),
        },
    }
}
