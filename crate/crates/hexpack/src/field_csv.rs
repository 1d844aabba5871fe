//! Text form of a [`ScalarField`].
//!
//! ```text
//! # window m_min m_max n_min n_max
//! u(m_min, n_max),...,u(m_max, n_max)
//! ...
//! u(m_min, n_min),...,u(m_max, n_min)
//! ```
//!
//! Values carry 17 significant digits, which round-trips every double.

use std::fmt::Write;

use hexpack_core::lattice::{LatticeError, VertexId};
use hexpack_core::{ScalarField, Window};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CsvError {
    #[error("missing `# window m_min m_max n_min n_max` header")]
    MissingHeader,
    #[error("malformed header: {0}")]
    BadHeader(String),
    #[error("expected {expected} rows, found {got}")]
    RowCount { expected: usize, got: usize },
    #[error("row {row}: expected {expected} values, found {got}")]
    ColumnCount { row: usize, expected: usize, got: usize },
    #[error("row {row}, column {col}: cannot parse {text:?}")]
    BadValue { row: usize, col: usize, text: String },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

pub fn render_field_csv(f: &ScalarField) -> String {
    let w = f.window();
    let mut out = String::new();
    writeln!(out, "# window {} {} {} {}", w.m_min, w.m_max, w.n_min, w.n_max).unwrap();
    for n in (w.n_min..=w.n_max).rev() {
        for m in w.m_min..=w.m_max {
            if m > w.m_min {
                out.push(',');
            }
            let x = f.get(VertexId::new(m, n)).expect("in window");
            write!(out, "{x:.16e}").unwrap();
        }
        out.push('\n');
    }
    out
}

fn parse_header(line: &str) -> Result<Window, CsvError> {
    let bad = || CsvError::BadHeader(line.to_string());
    let rest = line
        .strip_prefix('#')
        .map(str::trim_start)
        .and_then(|s| s.strip_prefix("window"))
        .ok_or(CsvError::MissingHeader)?;
    let nums: Vec<i32> = rest
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    let [m_min, m_max, n_min, n_max] = nums[..] else {
        return Err(bad());
    };
    Ok(Window::new(m_min, m_max, n_min, n_max)?)
}

pub fn parse_field_csv(text: &str) -> Result<ScalarField, CsvError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let window = parse_header(lines.next().ok_or(CsvError::MissingHeader)?.trim())?;
    let rows: Vec<&str> = lines.collect();
    let height = window.height();
    let width = window.width();
    if rows.len() != height {
        return Err(CsvError::RowCount {
            expected: height,
            got: rows.len(),
        });
    }
    // File rows run from n_max down; storage runs from n_min up.
    let mut values = vec![0.0; window.len()];
    for (r, line) in rows.iter().enumerate() {
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != width {
            return Err(CsvError::ColumnCount {
                row: r + 2,
                expected: width,
                got: cells.len(),
            });
        }
        let base = (height - 1 - r) * width;
        for (c, cell) in cells.iter().enumerate() {
            values[base + c] = cell.parse().map_err(|_| CsvError::BadValue {
                row: r + 2,
                col: c + 1,
                text: cell.to_string(),
            })?;
        }
    }
    Ok(ScalarField::new(window, values)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_field_layout() {
        let f = ScalarField::constant(Window::centered(1), 0.0).unwrap();
        let text = render_field_csv(&f);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# window -1 1 -1 1");
        assert_eq!(lines.len(), 4);
        for l in &lines[1..] {
            let cells: Vec<f64> = l.split(',').map(|c| c.parse().unwrap()).collect();
            assert_eq!(cells, [0.0; 3]);
        }
    }

    #[test]
    fn rows_run_top_down() {
        let w = Window::new(0, 2, 0, 1).unwrap();
        let f = ScalarField::from_fn(w, |v| (10 * v.n + v.m) as f64).unwrap();
        let text = render_field_csv(&f);
        let first: Vec<f64> = text.lines().nth(1).unwrap().split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(first, [10.0, 11.0, 12.0]);
    }

    #[test]
    fn bit_exact_round_trip() {
        let w = Window::new(-4, 3, -2, 5).unwrap();
        let f = ScalarField::from_fn(w, |v| (v.m as f64 * 0.1 + 1.0 / 3.0).exp() * (v.n as f64).sin() - 1e-300).unwrap();
        let g = parse_field_csv(&render_field_csv(&f)).unwrap();
        assert_eq!(g.window(), f.window());
        for (a, b) in f.values().iter().zip(g.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn rejects_malformed_input() {
        assert_eq!(parse_field_csv(""), Err(CsvError::MissingHeader));
        assert_eq!(parse_field_csv("1,2\n"), Err(CsvError::MissingHeader));
        assert!(matches!(parse_field_csv("# window 0 1 0\n"), Err(CsvError::BadHeader(_))));
        assert!(matches!(parse_field_csv("# window 0 1 0 0\n1\n"), Err(CsvError::ColumnCount { .. })));
        assert!(matches!(parse_field_csv("# window 0 1 0 1\n1,2\n"), Err(CsvError::RowCount { .. })));
        assert!(matches!(parse_field_csv("# window 0 0 0 0\nabc\n"), Err(CsvError::BadValue { .. })));
        assert!(matches!(parse_field_csv("# window 0 0 0 0\nNaN\n"), Err(CsvError::Lattice(_))));
    }
}
