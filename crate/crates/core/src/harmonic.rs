//! Edge weights under which `D1 u` of a packing is discrete harmonic.
//!
//! For a face `T` containing `v`, let `f_T(t)` interpolate linearly between
//! the log-radii on `T` and on its translate `R(T)`. Integrating the angle
//! gradient along `f_T` turns the difference of the angle sums at `R(v)` and
//! `v` into `Σ_w η_vw (D1 u_w − D1 u_v)`, where
//!
//! ```text
//! η_vw = Σ_{T ∋ v,w} ∫_0^1 ∂θ_v(f_T(t)) / ∂u_w dt.
//! ```
//!
//! Each integrand lies in `(0, 1)`, so `0 < η < 2`, and it is symmetric in
//! `v, w`. The integrals are evaluated with Gauss–Legendre quadrature.

use alloc::vec;
use alloc::vec::Vec;
use core::cell::OnceCell;
use core::fmt;

use crate::geometry::{angle_gradient_raw, LogRadiusTriple};
use crate::lattice::{faces_containing_edge, neighbors, translate, Face, LatticeError, ScalarField, VertexId, Window};
use crate::quadrature::GaussLegendre;

mod walk;

pub use walk::{random_walk_return, walk_trial, TrialOutcome, WalkOutcome};

/// Default Gauss–Legendre order for the weight integrals.
pub const DEFAULT_QUADRATURE_ORDER: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureRule {
    GaussLegendre,
}

/// A quadrature rule together with its precomputed nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature {
    rule: QuadratureRule,
    nodes: GaussLegendre,
}

impl Quadrature {
    pub fn gauss_legendre(order: usize) -> Result<Self, HarmonicError> {
        if order < 2 {
            return Err(HarmonicError::QuadratureOrder(order));
        }
        Ok(Self {
            rule: QuadratureRule::GaussLegendre,
            nodes: GaussLegendre::new(order),
        })
    }

    pub fn rule(&self) -> QuadratureRule {
        self.rule
    }

    pub fn order(&self) -> usize {
        self.nodes.order()
    }

    pub fn integrate(&self, f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.integrate(f)
    }
}

impl Default for Quadrature {
    fn default() -> Self {
        Self::gauss_legendre(DEFAULT_QUADRATURE_ORDER).expect("default order is valid")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum HarmonicError {
    Lattice(LatticeError),
    QuadratureOrder(usize),
    /// A face or its translate needed for an edge weight leaves the window.
    FaceOutsideWindow(Face),
    /// `v`, its neighbors or their translates are not all in the window.
    WindowTooSmall(VertexId),
    MissingEdge(VertexId, VertexId),
    NonPositiveWeight(VertexId, VertexId),
}

impl fmt::Display for HarmonicError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HarmonicError::Lattice(e) => write!(f, "{e}"),
            HarmonicError::QuadratureOrder(n) => write!(f, "quadrature order {n} is below 2"),
            HarmonicError::FaceOutsideWindow(t) => {
                let [a, b, c] = t.vertices();
                write!(f, "face {a} {b} {c} or its translate leaves the window")
            }
            HarmonicError::WindowTooSmall(v) => {
                write!(f, "window too small for a harmonic residual at {v}")
            }
            HarmonicError::MissingEdge(v, w) => write!(f, "no weight stored for edge {v} {w}"),
            HarmonicError::NonPositiveWeight(v, w) => write!(f, "non-positive weight on edge {v} {w}"),
        }
    }
}

impl core::error::Error for HarmonicError {}

impl From<LatticeError> for HarmonicError {
    fn from(e: LatticeError) -> Self {
        HarmonicError::Lattice(e)
    }
}

/// `f_T(t)`: log-radii on `face` moved a fraction `t` toward those on `R(face)`.
pub fn segment(u: &ScalarField, face: &Face, t: f64) -> Result<LogRadiusTriple, HarmonicError> {
    let (a, b) = segment_ends(u, face)?;
    Ok(LogRadiusTriple::from_array_unchecked(lerp(&a, &b, t)))
}

fn segment_ends(u: &ScalarField, face: &Face) -> Result<([f64; 3], [f64; 3]), HarmonicError> {
    let here = u.face_values(face);
    let there = u.face_values(&face.translate());
    match (here, there) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(HarmonicError::FaceOutsideWindow(*face)),
    }
}

#[inline]
fn lerp(a: &[f64; 3], b: &[f64; 3], t: f64) -> [f64; 3] {
    core::array::from_fn(|i| a[i] + (b[i] - a[i]) * t)
}

/// `η_vw` as seen from `v` (the integrand differentiates the angle at `v`).
pub fn eta(u: &ScalarField, v: VertexId, w: VertexId, q: &Quadrature) -> Result<f64, HarmonicError> {
    let faces = faces_containing_edge(v, w)?;
    let mut total = 0.0;
    for face in &faces {
        let (a, b) = segment_ends(u, face)?;
        // Faces come rotated to start at v.
        let slot = if face.vertices()[1] == w { 1 } else { 2 };
        total += q.integrate(|t| angle_gradient_raw(&lerp(&a, &b, t), 0).as_array()[slot]);
    }
    Ok(total)
}

fn check_residual_support(w: &Window, v: VertexId) -> Result<(), HarmonicError> {
    let ok = core::iter::once(v)
        .chain(neighbors(v))
        .all(|x| w.contains(x) && w.contains(translate(x)));
    if ok {
        Ok(())
    } else {
        Err(HarmonicError::WindowTooSmall(v))
    }
}

/// Whether [`harmonic_residual`] is defined at `v` for fields on `w`.
pub fn residual_supported(w: &Window, v: VertexId) -> bool {
    check_residual_support(w, v).is_ok()
}

/// `Σ_{w~v} η_vw (D1 u_w − D1 u_v)`. Equals the angle sum at `R(v)` minus
/// the angle sum at `v` up to quadrature error, so it vanishes when the
/// packing equation holds at both.
pub fn harmonic_residual(u: &ScalarField, v: VertexId, q: &Quadrature) -> Result<f64, HarmonicError> {
    check_residual_support(u.window(), v)?;
    residual_with(u, v, |x, y| eta(u, x, y, q))
}

fn residual_with(
    u: &ScalarField,
    v: VertexId,
    mut weight: impl FnMut(VertexId, VertexId) -> Result<f64, HarmonicError>,
) -> Result<f64, HarmonicError> {
    let d1 = |x: VertexId| u.get(translate(x)).expect("checked") - u.get(x).expect("checked");
    let dv = d1(v);
    let mut total = 0.0;
    for w in neighbors(v) {
        total += weight(v, w)? * (d1(w) - dv);
    }
    Ok(total)
}

/// Directed weights of a single field, computed on first use.
///
/// Each undirected edge is needed from both endpoints by a sweep of
/// residuals; the cache stores `η_vw` per direction, six slots per vertex.
pub struct WeightCache<'a> {
    u: &'a ScalarField,
    q: &'a Quadrature,
    slots: Vec<OnceCell<Result<f64, HarmonicError>>>,
}

impl<'a> WeightCache<'a> {
    pub fn new(u: &'a ScalarField, q: &'a Quadrature) -> Self {
        let slots = (0..6 * u.window().len()).map(|_| OnceCell::new()).collect();
        Self { u, q, slots }
    }

    /// Directed `η_vw`.
    pub fn eta(&self, v: VertexId, w: VertexId) -> Result<f64, HarmonicError> {
        let Some(i) = self.u.window().index(v) else {
            return Err(HarmonicError::Lattice(LatticeError::OutsideWindow(v)));
        };
        let Some(dir) = neighbors(v).iter().position(|&x| x == w) else {
            return Err(HarmonicError::Lattice(LatticeError::NotAdjacent(v, w)));
        };
        self.slots[6 * i + dir]
            .get_or_init(|| eta(self.u, v, w, self.q))
            .clone()
    }

    pub fn residual(&self, v: VertexId) -> Result<f64, HarmonicError> {
        check_residual_support(self.u.window(), v)?;
        residual_with(self.u, v, |x, y| self.eta(x, y))
    }

    /// Largest `|residual|` over every vertex where it is defined.
    pub fn max_abs_residual(&self) -> Option<f64> {
        let w = *self.u.window();
        w.vertices()
            .filter(|&v| residual_supported(&w, v))
            .map(|v| self.residual(v).expect("supported").abs())
            .reduce(f64::max)
    }
}

/// Direction slot of an undirected edge: the edge is stored at the endpoint
/// from which the other is reached by `(1,0)`, `(0,1)` or `(-1,1)`.
fn edge_slot(v: VertexId, w: VertexId) -> Option<(VertexId, usize)> {
    const FORWARD: [(i32, i32); 3] = [(1, 0), (0, 1), (-1, 1)];
    let d = (w.m - v.m, w.n - v.n);
    if let Some(k) = FORWARD.iter().position(|&o| o == d) {
        return Some((v, k));
    }
    FORWARD.iter().position(|&o| o == (-d.0, -d.1)).map(|k| (w, k))
}

/// Symmetric positive weights on the undirected edges of a window. Edges
/// whose weight could not be computed (too close to the window boundary)
/// are absent.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeWeights {
    window: Window,
    values: Vec<Option<f64>>,
}

impl EdgeWeights {
    /// No edges yet.
    pub fn empty(window: Window) -> Self {
        Self {
            window,
            values: vec![None; 3 * window.len()],
        }
    }

    /// `value` on every edge with both endpoints in `window`.
    pub fn uniform(window: Window, value: f64) -> Result<Self, HarmonicError> {
        let mut out = Self::empty(window);
        for v in window.vertices() {
            for w in neighbors(v) {
                if window.contains(w) {
                    out.insert(v, w, value)?;
                }
            }
        }
        Ok(out)
    }

    /// Weights of a log-radius field: the average of the two directed
    /// quadratures `η_vw` and `η_wv`, on every edge where both exist.
    pub fn from_field(u: &ScalarField, q: &Quadrature) -> Self {
        let window = *u.window();
        let mut out = Self::empty(window);
        for v in window.vertices() {
            for w in neighbors(v) {
                if edge_slot(v, w).map(|(a, _)| a) != Some(v) || !window.contains(w) {
                    continue;
                }
                if let (Ok(a), Ok(b)) = (eta(u, v, w, q), eta(u, w, v, q)) {
                    out.insert(v, w, 0.5 * (a + b)).expect("edge in window");
                }
            }
        }
        out
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn insert(&mut self, v: VertexId, w: VertexId, value: f64) -> Result<(), HarmonicError> {
        let (a, k) = edge_slot(v, w).ok_or(HarmonicError::Lattice(LatticeError::NotAdjacent(v, w)))?;
        if !self.window.contains(v) || !self.window.contains(w) {
            return Err(HarmonicError::MissingEdge(v, w));
        }
        if !(value.is_finite() && value > 0.0) {
            return Err(HarmonicError::NonPositiveWeight(v, w));
        }
        let i = self.window.index(a).expect("checked");
        self.values[3 * i + k] = Some(value);
        Ok(())
    }

    pub fn get(&self, v: VertexId, w: VertexId) -> Option<f64> {
        let (a, k) = edge_slot(v, w)?;
        let i = self.window.index(a)?;
        self.values[3 * i + k]
    }

    /// Stored edges as `(v, w, η)` with `w` reached from `v` by
    /// `(1,0)`, `(0,1)` or `(-1,1)`, in vertex storage order.
    pub fn iter(&self) -> impl Iterator<Item = (VertexId, VertexId, f64)> + '_ {
        const FORWARD: [(i32, i32); 3] = [(1, 0), (0, 1), (-1, 1)];
        self.values.iter().enumerate().filter_map(move |(s, x)| {
            let v = self.window.vertex_at(s / 3);
            let (dm, dn) = FORWARD[s % 3];
            x.map(|eta| (v, v.offset(dm, dn), eta))
        })
    }

    pub fn len(&self) -> usize {
        self.values.iter().filter(|x| x.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Sum of incident weights at `v`, or `None` if an incident edge is missing.
    pub fn degree(&self, v: VertexId) -> Option<f64> {
        neighbors(v).iter().map(|&w| self.get(v, w)).sum()
    }
}

/// `Vol(W) = Σ_{v∈W} Σ_{w~v} η_vw`.
pub fn volume(weights: &EdgeWeights, vertices: &[VertexId]) -> Result<f64, HarmonicError> {
    let mut total = 0.0;
    for &v in vertices {
        for w in neighbors(v) {
            total += weights.get(v, w).ok_or(HarmonicError::MissingEdge(v, w))?;
        }
    }
    Ok(total)
}
