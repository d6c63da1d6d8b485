//! Fixed-schema CSV tables.

use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Cell {
    Num(f64),
    Int(usize),
    Text(String),
    Empty,
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    pub fn opt(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }

    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Num(v) => Some(v),
            Cell::Int(v) => Some(v as f64),
            _ => None,
        }
    }

    fn render(&self) -> String {
        match self {
            Cell::Num(v) => v.to_string(),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| *h == name)
    }

    /// Rows whose text cells in the named columns equal the given values.
    pub fn select<'a>(&'a self, filters: &'a [(&str, &str)]) -> impl Iterator<Item = &'a Vec<Cell>> + 'a {
        let idx: Vec<(usize, &str)> = filters
            .iter()
            .map(|(c, v)| (self.column(c).expect("known column"), *v))
            .collect();
        self.rows
            .iter()
            .filter(move |r| idx.iter().all(|(i, v)| matches!(&r[*i], Cell::Text(t) if t == v)))
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(vec![]);
        w.write_record(&self.header).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::InvalidInput(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string()?)?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidInput(format!("{other:?}")),
    }
}

/// `quantity, method, value` rows written to the summary file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub quantity: String,
    pub method: String,
    pub value: f64,
}

pub fn summary_table(rows: &[SummaryRow]) -> Table {
    let mut t = Table::new(&["quantity", "method", "value"]);
    for r in rows {
        t.push(vec![Cell::text(&r.quantity), Cell::text(&r.method), Cell::Num(r.value)]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting_is_round_trip_and_stable() {
        let mut t = Table::new(&["a", "b", "c"]);
        t.push(vec![Cell::Num(0.1), Cell::Int(3), Cell::Empty]);
        t.push(vec![Cell::Num(1e-12), Cell::text("x,y"), Cell::Num(f64::INFINITY)]);
        let s = t.to_csv_string().unwrap();
        assert_eq!(s, "a,b,c\n0.1,3,\n0.000000000001,\"x,y\",inf\n");
        let back: f64 = "0.000000000001".parse().unwrap();
        assert_eq!(back, 1e-12);
    }

    #[test]
    fn select_filters_text_columns() {
        let mut t = Table::new(&["kind", "v"]);
        t.push(vec![Cell::text("a"), Cell::Num(1.0)]);
        t.push(vec![Cell::text("b"), Cell::Num(2.0)]);
        let rows: Vec<_> = t.select(&[("kind", "b")]).collect();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0][1].as_f64(), Some(2.0));
    }
}
