//! Combinatorics of the hexagonal triangulation.
//!
//! Vertex `(m, n)` sits at `m + n e^{iπ/3}` in the plane. Its six neighbors,
//! in counterclockwise order, are reached by the offsets in
//! [`NEIGHBOR_OFFSETS`]. Fields live on rectangular index windows
//! `[m_min, m_max] × [n_min, n_max]` and are stored densely, row by row.

use alloc::vec::Vec;
use core::fmt;
use core::hash::{Hash, Hasher};

/// Counterclockwise neighbor offsets, starting along the positive `m` axis.
pub const NEIGHBOR_OFFSETS: [(i32, i32); 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];

/// Lattice coordinate `(m, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId {
    pub m: i32,
    pub n: i32,
}

impl VertexId {
    pub const fn new(m: i32, n: i32) -> Self {
        Self { m, n }
    }

    pub const fn offset(self, dm: i32, dn: i32) -> Self {
        Self::new(self.m + dm, self.n + dn)
    }

    /// Planar position under the standard embedding `m + n e^{iπ/3}`.
    pub fn embed(self) -> (f64, f64) {
        let m = self.m as f64;
        let n = self.n as f64;
        (m + 0.5 * n, n * libm::sqrt(0.75))
    }

    pub fn is_adjacent(self, other: VertexId) -> bool {
        let d = (other.m - self.m, other.n - self.n);
        NEIGHBOR_OFFSETS.contains(&d)
    }
}

impl From<(i32, i32)> for VertexId {
    fn from((m, n): (i32, i32)) -> Self {
        Self::new(m, n)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.m, self.n)
    }
}

/// Neighbors of `v` in counterclockwise order.
pub fn neighbors(v: VertexId) -> [VertexId; 6] {
    NEIGHBOR_OFFSETS.map(|(dm, dn)| v.offset(dm, dn))
}

/// The translation `R(m, n) = (m + 1, n)`.
pub fn translate(v: VertexId) -> VertexId {
    v.offset(1, 0)
}

/// Graph distance on the hexagonal lattice.
pub fn distance(v: VertexId, w: VertexId) -> u32 {
    let dm = w.m - v.m;
    let dn = w.n - v.n;
    (dm.unsigned_abs() + dn.unsigned_abs() + (dm + dn).unsigned_abs()) / 2
}

/// All vertices within graph distance `radius` of `v`, sorted by `(m, n)`.
pub fn ball(v: VertexId, radius: u32) -> Vec<VertexId> {
    let r = radius as i32;
    let mut out = Vec::with_capacity((3 * r * r + 3 * r + 1) as usize);
    for dm in -r..=r {
        let lo = (-r).max(-r - dm);
        let hi = r.min(r - dm);
        for dn in lo..=hi {
            out.push(v.offset(dm, dn));
        }
    }
    out
}

/// A positively oriented triangle. Equality and hashing ignore cyclic
/// rotation, so `(a, b, c)`, `(b, c, a)` and `(c, a, b)` are the same face.
#[derive(Debug, Clone, Copy)]
pub struct Face(pub [VertexId; 3]);

impl Face {
    pub fn vertices(&self) -> [VertexId; 3] {
        self.0
    }

    /// Rotation that starts at the smallest vertex.
    pub fn canonical(&self) -> [VertexId; 3] {
        let [a, b, c] = self.0;
        let min = a.min(b).min(c);
        if min == a {
            [a, b, c]
        } else if min == b {
            [b, c, a]
        } else {
            [c, a, b]
        }
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.0.contains(&v)
    }

    /// `R(T)`: the face translated by `(1, 0)`.
    pub fn translate(&self) -> Face {
        Face(self.0.map(translate))
    }

    /// Rotation of the face that starts at `v`, if `v` is one of its vertices.
    pub fn rotated_to(&self, v: VertexId) -> Option<Face> {
        let [a, b, c] = self.0;
        if v == a {
            Some(Face([a, b, c]))
        } else if v == b {
            Some(Face([b, c, a]))
        } else if v == c {
            Some(Face([c, a, b]))
        } else {
            None
        }
    }

    /// Twice the signed area of the face under the standard embedding.
    pub fn signed_area2(&self) -> f64 {
        let [a, b, c] = self.0.map(VertexId::embed);
        (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
    }
}

impl PartialEq for Face {
    fn eq(&self, other: &Self) -> bool {
        self.canonical() == other.canonical()
    }
}

impl Eq for Face {}

impl Hash for Face {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.canonical().hash(state);
    }
}

/// The six faces at `v`, each `(v, n_i, n_{i+1})` for consecutive neighbors.
pub fn faces_at(v: VertexId) -> [Face; 6] {
    let nb = neighbors(v);
    core::array::from_fn(|i| Face([v, nb[i], nb[(i + 1) % 6]]))
}

/// The two faces sharing the edge `{v, w}`, each rotated to start at `v`.
pub fn faces_containing_edge(v: VertexId, w: VertexId) -> Result<[Face; 2], LatticeError> {
    let nb = neighbors(v);
    let i = nb
        .iter()
        .position(|&x| x == w)
        .ok_or(LatticeError::NotAdjacent(v, w))?;
    Ok([
        Face([v, nb[i], nb[(i + 1) % 6]]),
        Face([v, nb[(i + 5) % 6], nb[i]]),
    ])
}

#[derive(Debug, Clone, PartialEq)]
pub enum LatticeError {
    NotAdjacent(VertexId, VertexId),
    EmptyWindow,
    /// Number of values does not match the window size.
    ValueCount { expected: usize, got: usize },
    NonFinite(VertexId),
    OutsideWindow(VertexId),
    /// Window text not of the form `m_min:m_max,n_min:n_max`.
    WindowSyntax,
}

impl fmt::Display for LatticeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeError::NotAdjacent(v, w) => write!(f, "vertices {v} and {w} are not adjacent"),
            LatticeError::EmptyWindow => f.write_str("empty window"),
            LatticeError::ValueCount { expected, got } => {
                write!(f, "expected {expected} values, got {got}")
            }
            LatticeError::NonFinite(v) => write!(f, "non-finite value at {v}"),
            LatticeError::OutsideWindow(v) => write!(f, "vertex {v} outside the window"),
            LatticeError::WindowSyntax => f.write_str("window must look like m_min:m_max,n_min:n_max"),
        }
    }
}

impl core::error::Error for LatticeError {}

/// Interior vertices have all six neighbors inside the window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexKind {
    Interior,
    Boundary,
}

/// Rectangular index box `[m_min, m_max] × [n_min, n_max]`, both ends inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Window {
    pub m_min: i32,
    pub m_max: i32,
    pub n_min: i32,
    pub n_max: i32,
}

impl Window {
    pub fn new(m_min: i32, m_max: i32, n_min: i32, n_max: i32) -> Result<Self, LatticeError> {
        if m_min > m_max || n_min > n_max {
            return Err(LatticeError::EmptyWindow);
        }
        Ok(Self {
            m_min,
            m_max,
            n_min,
            n_max,
        })
    }

    /// Square window `[-half, half]²`.
    pub fn centered(half: i32) -> Self {
        Self::new(-half, half, -half, half).expect("non-negative half width")
    }

    pub fn width(&self) -> usize {
        (self.m_max - self.m_min + 1) as usize
    }

    pub fn height(&self) -> usize {
        (self.n_max - self.n_min + 1) as usize
    }

    pub fn len(&self) -> usize {
        self.width() * self.height()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, v: VertexId) -> bool {
        (self.m_min..=self.m_max).contains(&v.m) && (self.n_min..=self.n_max).contains(&v.n)
    }

    /// Row-major position of `v`: rows are indexed by `n`, columns by `m`.
    #[inline]
    pub fn index(&self, v: VertexId) -> Option<usize> {
        if self.contains(v) {
            Some((v.n - self.n_min) as usize * self.width() + (v.m - self.m_min) as usize)
        } else {
            None
        }
    }

    pub fn vertex_at(&self, index: usize) -> VertexId {
        let w = self.width();
        VertexId::new(self.m_min + (index % w) as i32, self.n_min + (index / w) as i32)
    }

    /// Every neighbor offset stays inside the box iff the vertex is off all
    /// four sides, so the classification is a pair of range checks.
    pub fn is_interior(&self, v: VertexId) -> bool {
        v.m > self.m_min && v.m < self.m_max && v.n > self.n_min && v.n < self.n_max
    }

    pub fn kind(&self, v: VertexId) -> Option<VertexKind> {
        if !self.contains(v) {
            None
        } else if self.is_interior(v) {
            Some(VertexKind::Interior)
        } else {
            Some(VertexKind::Boundary)
        }
    }

    /// All vertices in storage order.
    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.len()).map(move |i| self.vertex_at(i))
    }

    pub fn interior_vertices(&self) -> Vec<VertexId> {
        self.vertices().filter(|&v| self.is_interior(v)).collect()
    }

    pub fn boundary_vertices(&self) -> Vec<VertexId> {
        self.vertices().filter(|&v| !self.is_interior(v)).collect()
    }

    pub fn contains_face(&self, face: &Face) -> bool {
        face.0.iter().all(|&v| self.contains(v))
    }

    /// Vertex nearest the middle of the box.
    pub fn center(&self) -> VertexId {
        VertexId::new(
            self.m_min + (self.m_max - self.m_min) / 2,
            self.n_min + (self.n_max - self.n_min) / 2,
        )
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{},{}:{}", self.m_min, self.m_max, self.n_min, self.n_max)
    }
}

impl core::str::FromStr for Window {
    type Err = LatticeError;

    /// Parses `m_min:m_max,n_min:n_max`, the inverse of `Display`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let range = |part: &str| -> Result<(i32, i32), LatticeError> {
            let (a, b) = part.split_once(':').ok_or(LatticeError::WindowSyntax)?;
            let a = a.trim().parse().map_err(|_| LatticeError::WindowSyntax)?;
            let b = b.trim().parse().map_err(|_| LatticeError::WindowSyntax)?;
            Ok((a, b))
        };
        let (ms, ns) = s.split_once(',').ok_or(LatticeError::WindowSyntax)?;
        let (m_min, m_max) = range(ms)?;
        let (n_min, n_max) = range(ns)?;
        Window::new(m_min, m_max, n_min, n_max)
    }
}

/// One finite value per vertex of a window.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    window: Window,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(window: Window, values: Vec<f64>) -> Result<Self, LatticeError> {
        if values.len() != window.len() {
            return Err(LatticeError::ValueCount {
                expected: window.len(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|x| !x.is_finite()) {
            return Err(LatticeError::NonFinite(window.vertex_at(i)));
        }
        Ok(Self { window, values })
    }

    pub fn constant(window: Window, value: f64) -> Result<Self, LatticeError> {
        Self::new(window, alloc::vec![value; window.len()])
    }

    pub fn from_fn(window: Window, mut f: impl FnMut(VertexId) -> f64) -> Result<Self, LatticeError> {
        Self::new(window, window.vertices().map(&mut f).collect())
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    /// Values in storage order; see [`Window::index`].
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, v: VertexId) -> Option<f64> {
        self.window.index(v).map(|i| self.values[i])
    }

    pub fn set(&mut self, v: VertexId, value: f64) -> Result<(), LatticeError> {
        if !value.is_finite() {
            return Err(LatticeError::NonFinite(v));
        }
        let i = self.window.index(v).ok_or(LatticeError::OutsideWindow(v))?;
        self.values[i] = value;
        Ok(())
    }

    /// Unchecked store for solver inner loops; `i` is a storage index and the
    /// value is finite.
    #[inline]
    pub(crate) fn set_index(&mut self, i: usize, value: f64) {
        debug_assert!(value.is_finite());
        self.values[i] = value;
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &x)| (self.window.vertex_at(i), x))
    }

    pub fn max_abs_diff(&self, other: &ScalarField) -> Option<f64> {
        if self.window != other.window {
            return None;
        }
        Some(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        )
    }

    /// Values at the three vertices of `face`, if all are in the window.
    #[inline]
    pub fn face_values(&self, face: &Face) -> Option<[f64; 3]> {
        let [a, b, c] = face.0;
        Some([self.get(a)?, self.get(b)?, self.get(c)?])
    }

    fn forward_difference(&self, dm: i32, dn: i32) -> Result<ScalarField, LatticeError> {
        let w = self.window;
        let sub = Window::new(w.m_min, w.m_max - dm, w.n_min, w.n_max - dn)?;
        ScalarField::from_fn(sub, |v| {
            self.get(v.offset(dm, dn)).expect("shifted vertex in window") - self.get(v).expect("vertex in window")
        })
    }
}

/// `D1 f_{m,n} = f_{m+1,n} - f_{m,n}` on the window shrunk by one column.
pub fn d1(f: &ScalarField) -> Result<ScalarField, LatticeError> {
    f.forward_difference(1, 0)
}

/// `D2 f_{m,n} = f_{m,n+1} - f_{m,n}` on the window shrunk by one row.
pub fn d2(f: &ScalarField) -> Result<ScalarField, LatticeError> {
    f.forward_difference(0, 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::{BTreeSet, VecDeque};

    fn v(m: i32, n: i32) -> VertexId {
        VertexId::new(m, n)
    }

    #[test]
    fn window_text_round_trip() {
        let w: Window = "-10:10,-3:4".parse().unwrap();
        assert_eq!(w, Window::new(-10, 10, -3, 4).unwrap());
        assert_eq!(alloc::format!("{w}").parse::<Window>().unwrap(), w);
        assert_eq!("3:1,0:0".parse::<Window>(), Err(LatticeError::EmptyWindow));
        for bad in ["", "1:2", "1:2;3:4", "a:1,0:1", "1:2,3"] {
            assert_eq!(bad.parse::<Window>(), Err(LatticeError::WindowSyntax), "{bad}");
        }
    }

    #[test]
    fn neighbors_of_origin() {
        let expected = [v(1, 0), v(0, 1), v(-1, 1), v(-1, 0), v(0, -1), v(1, -1)];
        assert_eq!(neighbors(v(0, 0)), expected);
    }

    #[test]
    fn neighbors_at_unit_distance() {
        let c = v(2, -1);
        let (x0, y0) = c.embed();
        for w in neighbors(c) {
            let (x, y) = w.embed();
            assert!((libm::hypot(x - x0, y - y0) - 1.0).abs() < 1e-15);
        }
        // Counterclockwise: polar angles increase by π/3.
        for (i, w) in neighbors(c).iter().enumerate() {
            let (x, y) = w.embed();
            let ang = { let a = libm::atan2(y - y0, x - x0); if a < -1e-12 { a + core::f64::consts::TAU } else { a } };
            assert!((ang - i as f64 * core::f64::consts::FRAC_PI_3).abs() < 1e-12);
        }
    }

    #[test]
    fn adjacency_is_symmetric() {
        for c in [v(0, 0), v(5, -3)] {
            for w in neighbors(c) {
                assert!(neighbors(w).contains(&c));
            }
            assert!(neighbors(neighbors(c)[0]).contains(&c));
        }
    }

    #[test]
    fn faces_at_origin() {
        let faces = faces_at(v(0, 0));
        assert_eq!(faces.len(), 6);
        assert!(faces.contains(&Face([v(0, 0), v(1, 0), v(0, 1)])));
        for f in &faces {
            assert!(f.signed_area2() > 0.0);
        }
    }

    #[test]
    fn faces_shared_with_other_vertices() {
        let c = v(3, 1);
        for f in faces_at(c) {
            for w in f.vertices() {
                assert!(faces_at(w).contains(&f));
            }
        }
    }

    #[test]
    fn face_equality_is_cyclic() {
        let a = Face([v(0, 0), v(1, 0), v(0, 1)]);
        let b = Face([v(1, 0), v(0, 1), v(0, 0)]);
        let flipped = Face([v(0, 0), v(0, 1), v(1, 0)]);
        assert_eq!(a, b);
        assert_ne!(a, flipped);
    }

    #[test]
    fn edge_faces_match_enumeration() {
        let o = v(0, 0);
        let e = v(1, 0);
        let pair = faces_containing_edge(o, e).unwrap();
        assert_eq!(pair[0].vertices(), [o, e, v(0, 1)]);
        assert_eq!(pair[1].vertices(), [o, v(1, -1), e]);
        // Oracle: filter the faces at the origin.
        let filtered: Vec<Face> = faces_at(o).into_iter().filter(|f| f.contains(e)).collect();
        assert_eq!(filtered.len(), 2);
        for f in &pair {
            assert!(filtered.contains(f));
            assert!(f.signed_area2() > 0.0);
        }
    }

    #[test]
    fn every_edge_has_two_faces() {
        for w in neighbors(v(-2, 4)) {
            let pair = faces_containing_edge(v(-2, 4), w).unwrap();
            assert_ne!(pair[0], pair[1]);
            assert!(pair.iter().all(|f| f.contains(w)));
        }
    }

    #[test]
    fn non_edge_rejected() {
        assert_eq!(
            faces_containing_edge(v(0, 0), v(2, 0)),
            Err(LatticeError::NotAdjacent(v(0, 0), v(2, 0)))
        );
    }

    #[test]
    fn translation() {
        assert_eq!(translate(v(0, 0)), v(1, 0));
        let mut x = v(-4, 7);
        for _ in 0..5 {
            x = translate(x);
        }
        assert_eq!(x, v(1, 7));
        let c = v(2, 3);
        assert_eq!(neighbors(translate(c)), neighbors(c).map(translate));
    }

    fn bfs_ball(c: VertexId, r: u32) -> BTreeSet<VertexId> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        seen.insert(c);
        queue.push_back((c, 0));
        while let Some((x, d)) = queue.pop_front() {
            if d == r {
                continue;
            }
            for w in neighbors(x) {
                if seen.insert(w) {
                    queue.push_back((w, d + 1));
                }
            }
        }
        seen
    }

    #[test]
    fn ball_counts_match_bfs() {
        let c = v(1, -2);
        assert_eq!(ball(c, 0), alloc::vec![c]);
        assert_eq!(ball(c, 1).len(), 7);
        for r in 0..=50u32 {
            let b = ball(c, r);
            let oracle = bfs_ball(c, r);
            assert_eq!(b.len(), oracle.len());
            assert_eq!(b.len() as u32, 3 * r * r + 3 * r + 1);
            assert!(b.iter().all(|x| oracle.contains(x)));
        }
    }

    #[test]
    fn window_classification() {
        let w = Window::new(-2, 2, 0, 3).unwrap();
        assert_eq!(w.len(), 20);
        let interior = w.interior_vertices();
        assert_eq!(interior.len(), 3 * 2);
        for x in &interior {
            assert!(neighbors(*x).iter().all(|y| w.contains(*y)));
        }
        for x in w.boundary_vertices() {
            assert!(neighbors(x).iter().any(|y| !w.contains(*y)));
        }
        assert_eq!(w.interior_vertices().len() + w.boundary_vertices().len(), w.len());
        assert!(Window::new(1, 0, 0, 0).is_err());
        for i in 0..w.len() {
            assert_eq!(w.index(w.vertex_at(i)), Some(i));
        }
    }

    #[test]
    fn field_rejects_bad_values() {
        let w = Window::new(0, 1, 0, 1).unwrap();
        assert!(matches!(
            ScalarField::new(w, alloc::vec![0.0; 3]),
            Err(LatticeError::ValueCount { expected: 4, got: 3 })
        ));
        assert!(matches!(
            ScalarField::new(w, alloc::vec![0.0, f64::NAN, 0.0, 0.0]),
            Err(LatticeError::NonFinite(_))
        ));
    }

    #[test]
    fn differences_of_linear_fields() {
        let w = Window::new(-3, 4, -2, 5).unwrap();
        let c = ScalarField::constant(w, 2.5).unwrap();
        assert!(d1(&c).unwrap().values().iter().all(|&x| x == 0.0));
        let (alpha, beta) = (0.75, -1.25);
        let f = ScalarField::from_fn(w, |x| alpha * x.m as f64 + beta * x.n as f64).unwrap();
        assert!(d1(&f).unwrap().values().iter().all(|&x| (x - alpha).abs() < 1e-14));
        assert!(d2(&f).unwrap().values().iter().all(|&x| (x - beta).abs() < 1e-14));
        assert_eq!(d1(&f).unwrap().window().m_max, 3);
        assert_eq!(d2(&f).unwrap().window().n_max, 4);
    }

    #[test]
    fn differences_commute() {
        let w = Window::new(0, 6, 0, 5).unwrap();
        let f = ScalarField::from_fn(w, |x| libm::sin(x.m as f64 * 0.7) * (x.n * x.n) as f64).unwrap();
        let a = d1(&d2(&f).unwrap()).unwrap();
        let b = d2(&d1(&f).unwrap()).unwrap();
        assert_eq!(a.window(), b.window());
        assert!(a.max_abs_diff(&b).unwrap() < 1e-12);
    }

    #[test]
    fn difference_of_single_column_is_empty() {
        let w = Window::new(0, 0, 0, 3).unwrap();
        let f = ScalarField::constant(w, 1.0).unwrap();
        assert_eq!(d1(&f), Err(LatticeError::EmptyWindow));
        assert!(d2(&f).is_ok());
    }
}
