//! JSON and CSV exchange formats for solver reports, layouts, edge weights
//! and walk results.

use std::fmt::Write;

use hexpack_core::harmonic::{HarmonicError, WalkOutcome};
use hexpack_core::layout::Circle;
use hexpack_core::{EdgeWeights, Layout, SolveReport, VertexId, Window};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("no edges")]
    NoEdges,
    #[error(transparent)]
    Harmonic(#[from] HarmonicError),
}

/// `{"iterations", "final_defect", "converged"}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub iterations: usize,
    pub final_defect: f64,
    pub converged: bool,
}

impl From<&SolveReport> for ReportJson {
    fn from(r: &SolveReport) -> Self {
        Self {
            iterations: r.iterations,
            final_defect: r.final_defect,
            converged: r.converged,
        }
    }
}

pub fn report_json(r: &SolveReport) -> String {
    to_json(&ReportJson::from(r))
}

/// One circle of a layout export.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircleRecord {
    pub m: i32,
    pub n: i32,
    pub cx: f64,
    pub cy: f64,
    pub r: f64,
}

impl CircleRecord {
    pub fn vertex(&self) -> VertexId {
        VertexId::new(self.m, self.n)
    }

    pub fn circle(&self) -> Circle {
        Circle {
            center: (self.cx, self.cy),
            radius: self.r,
        }
    }
}

pub fn layout_records(layout: &Layout) -> Vec<CircleRecord> {
    layout
        .iter()
        .map(|(v, c)| CircleRecord {
            m: v.m,
            n: v.n,
            cx: c.center.0,
            cy: c.center.1,
            r: c.radius,
        })
        .collect()
}

pub fn layout_json(layout: &Layout) -> String {
    to_json(&layout_records(layout))
}

pub fn parse_layout_json(text: &str) -> Result<Vec<CircleRecord>, FormatError> {
    Ok(serde_json::from_str(text)?)
}

/// Rows `m1,n1,m2,n2,eta` after a header line, one per stored edge.
pub fn weights_csv(weights: &EdgeWeights) -> String {
    let mut out = String::from("m1,n1,m2,n2,eta\n");
    for (v, w, eta) in weights.iter() {
        writeln!(out, "{},{},{},{},{eta:.16e}", v.m, v.n, w.m, w.n).unwrap();
    }
    out
}

/// Inverse of [`weights_csv`]. The window is the bounding box of the edges.
pub fn parse_weights_csv(text: &str) -> Result<EdgeWeights, FormatError> {
    let mut edges = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with("m1") || line.starts_with('#') {
            continue;
        }
        let err = |msg: &str| FormatError::Line {
            line: i + 1,
            msg: msg.to_string(),
        };
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != 5 {
            return Err(err("expected m1,n1,m2,n2,eta"));
        }
        let mut ints = [0i32; 4];
        for (slot, cell) in ints.iter_mut().zip(&cells) {
            *slot = cell.parse().map_err(|_| err("bad vertex coordinate"))?;
        }
        let eta: f64 = cells[4].parse().map_err(|_| err("bad weight"))?;
        edges.push((VertexId::new(ints[0], ints[1]), VertexId::new(ints[2], ints[3]), eta));
    }
    let (first, _, _) = *edges.first().ok_or(FormatError::NoEdges)?;
    let (mut m0, mut m1, mut n0, mut n1) = (first.m, first.m, first.n, first.n);
    for &(v, w, _) in &edges {
        for x in [v, w] {
            m0 = m0.min(x.m);
            m1 = m1.max(x.m);
            n0 = n0.min(x.n);
            n1 = n1.max(x.n);
        }
    }
    let window = Window::new(m0, m1, n0, n1).expect("bounding box is non-empty");
    let mut out = EdgeWeights::empty(window);
    for (v, w, eta) in edges {
        out.insert(v, w, eta)?;
    }
    Ok(out)
}

/// `{"trials", "returned", "censored", "frequency", "seed"}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkJson {
    pub trials: u64,
    pub returned: u64,
    pub censored: u64,
    pub frequency: f64,
    pub seed: u64,
}

impl From<&WalkOutcome> for WalkJson {
    fn from(w: &WalkOutcome) -> Self {
        Self {
            trials: w.trials,
            returned: w.returned,
            censored: w.censored,
            frequency: w.frequency(),
            seed: w.seed,
        }
    }
}

pub fn walk_json(w: &WalkOutcome) -> String {
    to_json(&WalkJson::from(w))
}

/// Diagnostics printed by `hexpack verify`. Quantities that are undefined
/// on the given window (no edges with weights, no supported residual) are
/// `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyJson {
    pub max_defect: f64,
    pub min_eta: Option<f64>,
    pub max_eta: Option<f64>,
    pub max_harmonic_residual: Option<f64>,
    pub min_d1_ratio: Option<f64>,
    pub classification: String,
}

/// Pretty JSON with a trailing newline. Floats use the shortest text that
/// parses back to the same double.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}
