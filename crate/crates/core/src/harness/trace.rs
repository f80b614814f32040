//! Trace files: a header of input names, then one comma-separated row per instant.
//!
//! Cells are `tt`, `ff`, a decimal or `p/q` number, a range `[a,b]`, or `?`.
//! Text after `#` is a comment.

use crate::rational::{fmt_decimal, parse_rational};
use crate::spec::{Sort, Specification, Value};
use crate::symbolic::Reading;
use std::collections::HashMap;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("line {line}: malformed cell `{cell}`")]
    Cell { line: usize, cell: String },
    #[error("line {line}: range `{cell}` has lower end above upper end")]
    EmptyRange { line: usize, cell: String },
    #[error("line {line}: expected {expected} cells, found {found}")]
    Arity {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("trace has no header")]
    NoHeader,
    #[error("duplicate column `{0}`")]
    DuplicateColumn(String),
    #[error("column `{0}` is not an input of the specification")]
    UnknownColumn(String),
    #[error("input `{0}` has no column")]
    MissingColumn(String),
    #[error("line {line}: column `{column}` expects {expected}")]
    Sort {
        line: usize,
        column: String,
        expected: Sort,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceFile {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Reading>>,
}

fn strip_comment(line: &str) -> &str {
    line.split_once('#').map_or(line, |(a, _)| a).trim()
}

/// Splits on commas outside brackets.
fn split_cells(line: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in line.char_indices() {
        match c {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(line[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(line[start..].trim());
    out
}

pub fn parse_cell(cell: &str, line: usize) -> Result<Reading, TraceError> {
    let bad = || TraceError::Cell {
        line,
        cell: cell.to_string(),
    };
    match cell {
        "?" => return Ok(Reading::Unknown),
        "tt" => return Ok(Reading::Exact(Value::Bool(true))),
        "ff" => return Ok(Reading::Exact(Value::Bool(false))),
        _ => {}
    }
    if let Some(body) = cell.strip_prefix('[').and_then(|c| c.strip_suffix(']')) {
        let (lo, hi) = body.split_once(',').ok_or_else(bad)?;
        let lo = parse_rational(lo).ok_or_else(bad)?;
        let hi = parse_rational(hi).ok_or_else(bad)?;
        if lo > hi {
            return Err(TraceError::EmptyRange {
                line,
                cell: cell.to_string(),
            });
        }
        return Ok(Reading::Range(lo, hi));
    }
    parse_rational(cell)
        .map(|r| Reading::Exact(Value::Real(r)))
        .ok_or_else(bad)
}

pub fn render_cell(r: &Reading) -> String {
    match r {
        Reading::Unknown => "?".into(),
        Reading::Exact(Value::Bool(b)) => (if *b { "tt" } else { "ff" }).into(),
        Reading::Exact(Value::Real(v)) => fmt_decimal(v),
        Reading::Range(lo, hi) => format!("[{},{}]", fmt_decimal(lo), fmt_decimal(hi)),
    }
}

pub fn parse_trace(text: &str) -> Result<TraceFile, TraceError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, strip_comment(l)))
        .filter(|(_, l)| !l.is_empty());
    let (_, head) = lines.next().ok_or(TraceError::NoHeader)?;
    let header: Vec<String> = split_cells(head).into_iter().map(String::from).collect();
    for (i, h) in header.iter().enumerate() {
        if header[..i].contains(h) {
            return Err(TraceError::DuplicateColumn(h.clone()));
        }
    }
    let mut rows = Vec::new();
    for (line, l) in lines {
        let cells = split_cells(l);
        if cells.len() != header.len() {
            return Err(TraceError::Arity {
                line,
                expected: header.len(),
                found: cells.len(),
            });
        }
        rows.push(
            cells
                .into_iter()
                .map(|c| parse_cell(c, line))
                .collect::<Result<Vec<_>, _>>()?,
        );
    }
    Ok(TraceFile { header, rows })
}

pub fn load_trace(path: impl AsRef<Path>) -> Result<TraceFile, TraceError> {
    parse_trace(&std::fs::read_to_string(path)?)
}

impl TraceFile {
    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(render_cell).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), TraceError> {
        Ok(std::fs::write(path, self.render())?)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Checks columns against the inputs of `spec` and returns one reading map per instant.
    /// Line numbers in errors count data rows from 1.
    pub fn readings_for(
        &self,
        spec: &Specification,
    ) -> Result<Vec<HashMap<String, Reading>>, TraceError> {
        let mut sorts = Vec::with_capacity(self.header.len());
        for h in &self.header {
            let d = spec
                .inputs
                .iter()
                .find(|d| d.name == *h)
                .ok_or_else(|| TraceError::UnknownColumn(h.clone()))?;
            sorts.push(d.sort);
        }
        if let Some(d) = spec.inputs.iter().find(|d| !self.header.contains(&d.name)) {
            return Err(TraceError::MissingColumn(d.name.clone()));
        }
        let mut out = Vec::with_capacity(self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            let mut map = HashMap::with_capacity(row.len());
            for ((h, sort), r) in self.header.iter().zip(&sorts).zip(row) {
                let ok = match r {
                    Reading::Unknown => true,
                    Reading::Exact(v) => v.sort() == *sort,
                    Reading::Range(..) => *sort == Sort::Real,
                };
                if !ok {
                    return Err(TraceError::Sort {
                        line: i + 1,
                        column: h.clone(),
                        expected: *sort,
                    });
                }
                map.insert(h.clone(), r.clone());
            }
            out.push(map);
        }
        Ok(out)
    }
}
