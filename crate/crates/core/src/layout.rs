//! Developing map: planar circles from log-radii, plus univalence checks.
//!
//! Placement is breadth first from an anchor. Once two circles of a face
//! are in the plane, the third is fixed by the tangency distances and the
//! inner angle at an already placed vertex, turning counterclockwise.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::geometry::theta_raw;
use crate::lattice::{d1, faces_at, neighbors, Face, ScalarField, VertexId, Window};
use crate::solver::angle_defect;

/// Largest `|angle defect|` accepted by [`develop`].
pub const MAX_DEVELOP_DEFECT: f64 = 1e-8;
/// Relative disagreement between two placements of one circle that counts
/// as a monodromy failure.
pub const PLACEMENT_TOLERANCE: f64 = 1e-7;
/// Relative slack for tangent circles in the univalence test.
pub const TANGENCY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: (f64, f64),
    pub radius: f64,
}

impl Circle {
    pub fn distance_to(&self, other: &Circle) -> f64 {
        libm::hypot(self.center.0 - other.center.0, self.center.1 - other.center.1)
    }
}

/// Where the development starts: `vertex` is centered at `center`, and its
/// first neighbor in counterclockwise order that lies in the window is
/// placed in direction `direction` (radians from the positive x axis).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Anchor {
    pub vertex: VertexId,
    pub center: (f64, f64),
    pub direction: f64,
}

impl Anchor {
    /// `(0, 0)` if it lies in the window, else the window center; placed at
    /// the origin with its first neighbor along the positive x axis.
    pub fn default_for(w: &Window) -> Self {
        let origin = VertexId::new(0, 0);
        Self {
            vertex: if w.contains(origin) { origin } else { w.center() },
            center: (0.0, 0.0),
            direction: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LayoutError {
    DefectTooLarge(VertexId),
    InconsistentPlacement(VertexId),
    /// The window is one vertex wide in some direction and has no faces.
    DegenerateWindow,
    AnchorOutsideWindow(VertexId),
    NotInterior(VertexId),
    WindowTooNarrow,
}

impl fmt::Display for LayoutError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LayoutError::DefectTooLarge(v) => write!(f, "angle defect at {v} exceeds {MAX_DEVELOP_DEFECT:e}"),
            LayoutError::InconsistentPlacement(v) => write!(f, "circle at {v} placed inconsistently"),
            LayoutError::DegenerateWindow => f.write_str("window has no faces to develop"),
            LayoutError::AnchorOutsideWindow(v) => write!(f, "anchor {v} outside the window"),
            LayoutError::NotInterior(v) => write!(f, "vertex {v} is not interior"),
            LayoutError::WindowTooNarrow => f.write_str("window must be at least two columns wide"),
        }
    }
}

impl core::error::Error for LayoutError {}

/// Circles for every vertex of a window.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    window: Window,
    circles: Vec<Circle>,
    anchor: Anchor,
}

#[inline]
fn rotate((x, y): (f64, f64), angle: f64) -> (f64, f64) {
    let (s, c) = libm::sincos(angle);
    (c * x - s * y, s * x + c * y)
}

/// Center of a circle of radius `r_new` tangent to the circle `(c_from,
/// r_from)`, in the direction of `toward` turned by `angle`.
fn place(c_from: (f64, f64), r_from: f64, toward: (f64, f64), angle: f64, r_new: f64) -> (f64, f64) {
    let dx = toward.0 - c_from.0;
    let dy = toward.1 - c_from.1;
    let len = libm::hypot(dx, dy);
    let (ux, uy) = rotate((dx / len, dy / len), angle);
    let d = r_from + r_new;
    (c_from.0 + d * ux, c_from.1 + d * uy)
}

/// Develops `u` into the plane. Every interior angle sum must be within
/// [`MAX_DEVELOP_DEFECT`] of `2π`.
pub fn develop(u: &ScalarField, anchor: Anchor) -> Result<Layout, LayoutError> {
    let w = *u.window();
    for v in w.interior_vertices() {
        if angle_defect(u, v).expect("interior").abs() > MAX_DEVELOP_DEFECT {
            return Err(LayoutError::DefectTooLarge(v));
        }
    }
    if !w.contains(anchor.vertex) {
        return Err(LayoutError::AnchorOutsideWindow(anchor.vertex));
    }
    let radius = |v: VertexId| libm::exp(u.get(v).expect("in window"));
    let mut centers: Vec<Option<(f64, f64)>> = vec![None; w.len()];
    let idx = |v: VertexId| w.index(v).expect("in window");

    let base = anchor.vertex;
    centers[idx(base)] = Some(anchor.center);
    if w.len() == 1 {
        return Ok(Layout {
            window: w,
            circles: vec![Circle {
                center: anchor.center,
                radius: radius(base),
            }],
            anchor,
        });
    }
    if w.width() < 2 || w.height() < 2 {
        return Err(LayoutError::DegenerateWindow);
    }
    let first = neighbors(base)
        .into_iter()
        .find(|&x| w.contains(x))
        .expect("a 2x2 window gives every vertex a neighbor");
    let (s, c) = libm::sincos(anchor.direction);
    let d = radius(base) + radius(first);
    centers[idx(first)] = Some((anchor.center.0 + d * c, anchor.center.1 + d * s));

    let mut queue = VecDeque::from([base, first]);
    while let Some(x) = queue.pop_front() {
        let cx = centers[idx(x)].expect("queued vertices are placed");
        let rx = radius(x);
        for face in faces_at(x) {
            if !w.contains_face(&face) {
                continue;
            }
            let [_, a, b] = face.vertices();
            let ux = u.get(x).expect("in window");
            let angle = theta_raw(u.get(a).expect("face") - ux, u.get(b).expect("face") - ux);
            match (centers[idx(a)], centers[idx(b)]) {
                (Some(ca), cb) => {
                    let cand = place(cx, rx, ca, angle, radius(b));
                    match cb {
                        None => {
                            centers[idx(b)] = Some(cand);
                            queue.push_back(b);
                        }
                        Some(cb) => check_consistent(b, cb, cand, rx + radius(b))?,
                    }
                }
                (None, Some(cb)) => {
                    let cand = place(cx, rx, cb, -angle, radius(a));
                    centers[idx(a)] = Some(cand);
                    queue.push_back(a);
                }
                (None, None) => {}
            }
        }
    }

    let circles = w
        .vertices()
        .map(|v| Circle {
            center: centers[idx(v)].expect("a box is face connected"),
            radius: radius(v),
        })
        .collect();
    Ok(Layout {
        window: w,
        circles,
        anchor,
    })
}

fn check_consistent(v: VertexId, have: (f64, f64), cand: (f64, f64), scale: f64) -> Result<(), LayoutError> {
    if libm::hypot(have.0 - cand.0, have.1 - cand.1) > PLACEMENT_TOLERANCE * scale {
        Err(LayoutError::InconsistentPlacement(v))
    } else {
        Ok(())
    }
}

impl Layout {
    /// Builds a layout from known circles in window storage order.
    pub fn from_circles(window: Window, circles: Vec<Circle>, anchor: Anchor) -> Option<Self> {
        (circles.len() == window.len()).then_some(Self {
            window,
            circles,
            anchor,
        })
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn anchor(&self) -> &Anchor {
        &self.anchor
    }

    pub fn circle(&self, v: VertexId) -> Option<&Circle> {
        self.window.index(v).map(|i| &self.circles[i])
    }

    pub fn circles(&self) -> &[Circle] {
        &self.circles
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, &Circle)> + '_ {
        self.circles
            .iter()
            .enumerate()
            .map(move |(i, c)| (self.window.vertex_at(i), c))
    }

    /// Log-radius field of the layout.
    pub fn log_radii(&self) -> ScalarField {
        ScalarField::new(self.window, self.circles.iter().map(|c| libm::log(c.radius)).collect())
            .expect("radii are positive and finite")
    }

    /// Largest `| |c_v − c_w| − (r_v + r_w) | / (r_v + r_w)` over edges.
    pub fn max_tangency_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (v, cv) in self.iter() {
            for w in neighbors(v) {
                if let Some(cw) = self.circle(w) {
                    let sum = cv.radius + cw.radius;
                    worst = worst.max((cv.distance_to(cw) - sum).abs() / sum);
                }
            }
        }
        worst
    }

    /// Signed area of the triangle of centers of `face` divided by the
    /// square of its largest radius sum; positive iff counterclockwise.
    pub fn face_orientation(&self, face: &Face) -> Option<f64> {
        let [a, b, c] = face.vertices();
        let (ca, cb, cc) = (self.circle(a)?, self.circle(b)?, self.circle(c)?);
        let area2 = (cb.center.0 - ca.center.0) * (cc.center.1 - ca.center.1)
            - (cb.center.1 - ca.center.1) * (cc.center.0 - ca.center.0);
        let scale = (ca.radius + cb.radius).max(ca.radius + cc.radius).max(cb.radius + cc.radius);
        Some(area2 / (scale * scale))
    }

    /// Smallest normalized orientation over all faces in the window.
    pub fn min_face_orientation(&self) -> Option<f64> {
        self.faces().filter_map(|f| self.face_orientation(&f)).reduce(f64::min)
    }

    /// Each face of the window once, as `(v, v+(1,0), v+(0,1))` and
    /// `(v, v+(0,1), v+(-1,1))`.
    pub fn faces(&self) -> impl Iterator<Item = Face> + '_ {
        self.window.vertices().flat_map(move |v| {
            let up = Face([v, v.offset(1, 0), v.offset(0, 1)]);
            let left = Face([v, v.offset(0, 1), v.offset(-1, 1)]);
            [up, left].into_iter().filter(|f| self.window.contains_face(f))
        })
    }
}

/// Develops the flower of `v` alone: center at the origin, first neighbor on
/// the positive x axis, each later neighbor turned by the inner angle at `v`.
/// Returns the center circle followed by the six neighbors and, last, the
/// first neighbor placed again after a full turn.
pub fn develop_flower(u: &ScalarField, v: VertexId) -> Result<[Circle; 8], LayoutError> {
    if !u.window().is_interior(v) {
        return Err(LayoutError::NotInterior(v));
    }
    let uv = u.get(v).expect("interior");
    let nb = neighbors(v).map(|w| u.get(w).expect("interior") - uv);
    let rv = libm::exp(uv);
    let mut out = [Circle {
        center: (0.0, 0.0),
        radius: rv,
    }; 8];
    let mut phi: f64 = 0.0;
    for k in 0..7 {
        let i = k % 6;
        let r = rv * libm::exp(nb[i]);
        let (s, c) = libm::sincos(phi);
        out[k + 1] = Circle {
            center: ((rv + r) * c, (rv + r) * s),
            radius: r,
        };
        phi += theta_raw(nb[i], nb[(i + 1) % 6]);
    }
    Ok(out)
}

/// Distance between the first neighbor of `v` and its re-development after
/// turning once around `v`, relative to `r_v + r_w`.
pub fn monodromy_residual(u: &ScalarField, v: VertexId) -> Result<f64, LayoutError> {
    let f = develop_flower(u, v)?;
    Ok(f[1].distance_to(&f[7]) / (f[0].radius + f[1].radius))
}

/// All six inner angles at `v` lie in `(0, π)` and add up to `2π` within
/// `1e-9`, so the six carrier faces of the flower do not overlap.
pub fn check_local_univalence(u: &ScalarField, v: VertexId) -> Result<bool, LayoutError> {
    if !u.window().is_interior(v) {
        return Err(LayoutError::NotInterior(v));
    }
    let uv = u.get(v).expect("interior");
    let nb = neighbors(v).map(|w| u.get(w).expect("interior") - uv);
    let mut sum = 0.0;
    for i in 0..6 {
        let t = theta_raw(nb[i], nb[(i + 1) % 6]);
        if !(t > 0.0 && t < core::f64::consts::PI) {
            return Ok(false);
        }
        sum += t;
    }
    Ok((sum - core::f64::consts::TAU).abs() <= 1e-9)
}

/// Whether the flower of `v`, developed on its own, closes up and has
/// pairwise disjoint circle interiors (tangency allowed). A flower whose
/// angle sum misses `2π` by more than `1e-9` is not a packing and is rejected.
pub fn check_univalent_flower(u: &ScalarField, v: VertexId) -> Result<bool, LayoutError> {
    if !check_local_univalence(u, v)? {
        return Ok(false);
    }
    let f = develop_flower(u, v)?;
    let circles = &f[..7];
    for i in 0..circles.len() {
        for j in (i + 1)..circles.len() {
            let sum = circles[i].radius + circles[j].radius;
            if circles[i].distance_to(&circles[j]) < sum - TANGENCY_SLACK * sum {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `min r_{m+1,n} / r_{m,n}` over the window.
pub fn ring_ratio_bound(u: &ScalarField) -> Result<f64, LayoutError> {
    let diffs = d1(u).map_err(|_| LayoutError::WindowTooNarrow)?;
    let min = diffs.values().iter().copied().fold(f64::INFINITY, f64::min);
    Ok(libm::exp(min))
}

/// `min_{w~v} r_w / r_v`.
pub fn flower_ratio_check(u: &ScalarField, v: VertexId) -> Result<f64, LayoutError> {
    if !u.window().is_interior(v) {
        return Err(LayoutError::NotInterior(v));
    }
    let uv = u.get(v).expect("interior");
    let min = neighbors(v)
        .iter()
        .map(|&w| u.get(w).expect("interior") - uv)
        .fold(f64::INFINITY, f64::min);
    Ok(libm::exp(min))
}
