//! Square-matrix CSV files with a header row and column of stock symbols.
//!
//! Floats are written in Rust's shortest round-trip form so a reloaded
//! matrix is bit-identical to the one written. Missing cells are empty.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

/// Row-major `n x n` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    n: usize,
    cells: Vec<T>,
}

impl<T: Clone> Grid<T> {
    pub fn filled(n: usize, value: T) -> Self {
        Grid {
            n,
            cells: vec![value; n * n],
        }
    }
}

impl<T> Grid<T> {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut cells = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                cells.push(f(i, j));
            }
        }
        Grid { n, cells }
    }

    pub fn from_vec(n: usize, cells: Vec<T>) -> Result<Self> {
        if cells.len() != n * n {
            return Err(Error::Dimension(format!(
                "{} cells for a {n}x{n} grid",
                cells.len()
            )));
        }
        Ok(Grid { n, cells })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.cells[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.cells[i * self.n + j] = value;
    }

    pub fn cells(&self) -> &[T] {
        &self.cells
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Grid<U> {
        Grid {
            n: self.n,
            cells: self.cells.iter().map(f).collect(),
        }
    }

    /// Iterates `(i, j, value)` over off-diagonal cells in row-major order.
    pub fn off_diagonal(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        let n = self.n;
        self.cells
            .iter()
            .enumerate()
            .map(move |(k, v)| (k / n, k % n, v))
            .filter(|(i, j, _)| i != j)
    }
}

pub trait CellFormat {
    fn render(&self) -> String;
    fn parse(raw: &str) -> std::result::Result<Self, String>
    where
        Self: Sized;
}

impl CellFormat for f64 {
    fn render(&self) -> String {
        self.to_string()
    }
    fn parse(raw: &str) -> std::result::Result<Self, String> {
        raw.parse().map_err(|_| format!("bad number `{raw}`"))
    }
}

impl CellFormat for u64 {
    fn render(&self) -> String {
        self.to_string()
    }
    fn parse(raw: &str) -> std::result::Result<Self, String> {
        raw.parse().map_err(|_| format!("bad count `{raw}`"))
    }
}

impl<T: CellFormat> CellFormat for Option<T> {
    fn render(&self) -> String {
        self.as_ref().map(T::render).unwrap_or_default()
    }
    fn parse(raw: &str) -> std::result::Result<Self, String> {
        if raw.is_empty() {
            Ok(None)
        } else {
            T::parse(raw).map(Some)
        }
    }
}

pub fn grid_to_csv<T: CellFormat>(symbols: &[String], grid: &Grid<T>) -> String {
    let mut s = String::from("symbol");
    for sym in symbols {
        s.push(',');
        s.push_str(sym);
    }
    s.push('\n');
    for (i, sym) in symbols.iter().enumerate() {
        s.push_str(sym);
        for j in 0..grid.n() {
            s.push(',');
            s.push_str(&grid.get(i, j).render());
        }
        s.push('\n');
    }
    s
}

pub fn write_grid<T: CellFormat>(path: &Path, symbols: &[String], grid: &Grid<T>) -> Result<()> {
    if symbols.len() != grid.n() {
        return Err(Error::Dimension(format!(
            "{} symbols for a {}x{} matrix",
            symbols.len(),
            grid.n(),
            grid.n()
        )));
    }
    write_text(path, &grid_to_csv(symbols, grid))
}

/// Reads a grid and its symbol header.
pub fn read_grid<T: CellFormat>(path: &Path) -> Result<(Vec<String>, Grid<T>)> {
    let text = read_text(path)?;
    let mut lines = text.lines().filter(|l| !l.is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse {
        line: 1,
        msg: format!("{}: empty matrix file", path.display()),
    })?;
    let symbols: Vec<String> = header.split(',').skip(1).map(str::to_string).collect();
    let n = symbols.len();
    let mut cells = Vec::with_capacity(n * n);
    let mut rows = 0;
    for (k, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != n + 1 || fields[0] != symbols[rows.min(n.saturating_sub(1))] {
            return Err(Error::Parse {
                line: k + 2,
                msg: format!("{}: malformed matrix row", path.display()),
            });
        }
        for raw in &fields[1..] {
            cells.push(T::parse(raw).map_err(|msg| Error::Parse { line: k + 2, msg })?);
        }
        rows += 1;
    }
    if rows != n {
        return Err(Error::Parse {
            line: rows + 1,
            msg: format!("{}: {rows} rows for {n} symbols", path.display()),
        });
    }
    Ok((symbols, Grid::from_vec(n, cells)?))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|source| Error::Json {
        path: path.into(),
        source,
    })?;
    text.push('\n');
    write_text(path, &text)
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.into(),
        source,
    })
}

/// Writes rows of already-rendered fields under a header.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        let _ = writeln!(s, "{}", r.join(","));
    }
    write_text(path, &s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_round_trip_keeps_bits_and_missing_cells() {
        let dir = tempfile::tempdir().unwrap();
        let symbols = vec!["A".to_string(), "B".to_string()];
        let g =
            Grid::from_vec(2, vec![Some(0.1 + 0.2), None, Some(-1e-7 / 3.0), Some(5.0)]).unwrap();
        let p = dir.path().join("m.csv");
        write_grid(&p, &symbols, &g).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("symbol,A,B\nA,0.30000000000000004,\n"));
        let (s2, g2) = read_grid::<Option<f64>>(&p).unwrap();
        assert_eq!(s2, symbols);
        assert_eq!(g2, g);
    }

    #[test]
    fn off_diagonal_iteration() {
        let g = Grid::from_fn(3, |i, j| i * 3 + j);
        let cells: Vec<usize> = g.off_diagonal().map(|(_, _, v)| *v).collect();
        assert_eq!(cells, vec![1, 2, 3, 5, 6, 7]);
    }

    #[test]
    fn rejects_ragged_files() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.csv");
        std::fs::write(&p, "symbol,A,B\nA,1,2\nB,3\n").unwrap();
        assert!(read_grid::<f64>(&p).is_err());
    }
}
