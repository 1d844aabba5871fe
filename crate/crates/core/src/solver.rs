//! The packing equation on a finite window: at every interior vertex the six
//! inner angles meet to `2π`, while boundary log-radii stay fixed.
//!
//! The angle sum at `v` strictly decreases in `u_v` (from `6π` to `0`), so
//! each interior vertex has a unique local solution given its neighbors.
//! Gauss–Seidel and Jacobi sweeps solve those 1-D problems with a
//! safeguarded Newton iteration; Newton mode linearizes the whole system.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;
use core::fmt;

use crate::geometry::{dtheta_dx1_raw, theta_raw};
use crate::lattice::{neighbors, ScalarField, VertexId, Window};
use crate::linalg::{conjugate_gradient, SparseMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolveMode {
    #[default]
    GaussSeidel,
    Jacobi,
    Newton,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub mode: SolveMode,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: 100_000,
            mode: SolveMode::GaussSeidel,
        }
    }
}

impl SolveOptions {
    pub fn new(tolerance: f64, max_iterations: usize, mode: SolveMode) -> Result<Self, SolverError> {
        if !(tolerance.is_finite() && tolerance > 0.0) || max_iterations == 0 {
            return Err(SolverError::InvalidOptions);
        }
        Ok(Self {
            tolerance,
            max_iterations,
            mode,
        })
    }
}

/// Outcome of a solve. `final_defect` is the largest `|2π − angle sum|` over
/// interior vertices after the last iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    pub final_defect: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolverError {
    NotInterior(VertexId),
    /// The window has no interior vertex.
    InvalidPatch,
    InvalidOptions,
    /// Iteration budget exhausted; carries the last iterate.
    NonConvergence { report: SolveReport, field: ScalarField },
}

impl fmt::Display for SolverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverError::NotInterior(v) => write!(f, "vertex {v} is not interior to the window"),
            SolverError::InvalidPatch => f.write_str("window has no interior vertices"),
            SolverError::InvalidOptions => {
                f.write_str("tolerance must be positive and max_iterations at least 1")
            }
            SolverError::NonConvergence { report, .. } => write!(
                f,
                "no convergence after {} iterations (defect {:e})",
                report.iterations, report.final_defect
            ),
        }
    }
}

impl core::error::Error for SolverError {}

/// Sum of the six inner angles at interior vertex `v`.
pub fn angle_sum(u: &ScalarField, v: VertexId) -> Result<f64, SolverError> {
    if !u.window().is_interior(v) {
        return Err(SolverError::NotInterior(v));
    }
    let c = u.get(v).expect("interior vertex in window");
    let nb = neighbors(v).map(|w| u.get(w).expect("neighbor of interior vertex in window") - c);
    Ok(shifted_sum(&nb, 0.0))
}

/// `2π − angle_sum(u, v)`; positive when the flower has room to grow.
pub fn angle_defect(u: &ScalarField, v: VertexId) -> Result<f64, SolverError> {
    angle_sum(u, v).map(|s| TAU - s)
}

/// Largest `|angle_defect|` over interior vertices (0 when there are none).
pub fn max_defect(u: &ScalarField) -> f64 {
    let patch = Patch::new(u.window());
    patch.max_defect(u.values())
}

/// Angle sum at a center of log-radius `s` with neighbor log-radii `nb`.
#[inline]
fn shifted_sum(nb: &[f64; 6], s: f64) -> f64 {
    (0..6).map(|i| theta_raw(nb[i] - s, nb[(i + 1) % 6] - s)).sum()
}

/// Derivative of [`shifted_sum`] in `s` (negative).
#[inline]
fn shifted_sum_slope(nb: &[f64; 6], s: f64) -> f64 {
    -(0..6)
        .map(|i| {
            let a = nb[i] - s;
            let b = nb[(i + 1) % 6] - s;
            dtheta_dx1_raw(a, b) + dtheta_dx1_raw(b, a)
        })
        .sum::<f64>()
}

/// Solves `shifted_sum(nb, s) = 2π` for `s`, starting from `s0`.
///
/// Newton steps are kept inside the current bracket; a step that leaves it
/// is replaced by bisection, or by a doubling search while the bracket is
/// still one-sided.
pub(crate) fn relax_local(nb: &[f64; 6], s0: f64, tol: f64) -> f64 {
    let mut s = s0;
    let mut g = shifted_sum(nb, s) - TAU;
    // g > 0 at lo, g < 0 at hi.
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    let mut reach = 1.0;
    for _ in 0..200 {
        if g.abs() <= tol {
            break;
        }
        if g > 0.0 {
            lo = s;
        } else {
            hi = s;
        }
        let newton = s - g / shifted_sum_slope(nb, s);
        let next = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else if lo.is_finite() && hi.is_finite() {
            0.5 * (lo + hi)
        } else {
            reach *= 2.0;
            if lo.is_finite() {
                lo + reach
            } else {
                hi - reach
            }
        };
        if next == s || (hi - lo) <= 4.0 * f64::EPSILON * s.abs().max(1.0) {
            break;
        }
        s = next;
        g = shifted_sum(nb, s) - TAU;
    }
    s
}

/// Runs one Jacobi sweep's worth of independent per-vertex updates.
///
/// `update(i)` returns the new value for the `i`-th interior vertex and
/// reads only the previous iterate, so implementations may evaluate the
/// updates in any order or concurrently. Results go to `out[i]`.
pub trait SweepExecutor {
    fn run(&self, out: &mut [f64], update: &(dyn Fn(usize) -> f64 + Sync));
}

/// Evaluates updates one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl SweepExecutor for Sequential {
    fn run(&self, out: &mut [f64], update: &(dyn Fn(usize) -> f64 + Sync)) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = update(i);
        }
    }
}

/// Interior vertices of a window with storage indices of their neighbors.
struct Patch {
    interior: Vec<usize>,
    nbrs: Vec<[usize; 6]>,
}

impl Patch {
    fn new(w: &Window) -> Self {
        let mut interior = Vec::new();
        let mut nbrs = Vec::new();
        for v in w.interior_vertices() {
            interior.push(w.index(v).expect("in window"));
            nbrs.push(neighbors(v).map(|x| w.index(x).expect("neighbor in window")));
        }
        Self { interior, nbrs }
    }

    fn len(&self) -> usize {
        self.interior.len()
    }

    /// Neighbor values at interior vertex `k` and its own value.
    #[inline]
    fn gather(&self, vals: &[f64], k: usize) -> ([f64; 6], f64) {
        (self.nbrs[k].map(|j| vals[j]), vals[self.interior[k]])
    }

    fn defect(&self, vals: &[f64], k: usize) -> f64 {
        let (nb, s) = self.gather(vals, k);
        TAU - shifted_sum(&nb, s)
    }

    fn max_defect(&self, vals: &[f64]) -> f64 {
        (0..self.len())
            .map(|k| self.defect(vals, k).abs())
            .fold(0.0, f64::max)
    }
}

/// Solves the packing equation with the boundary of `u0` held fixed and its
/// interior as the initial guess.
pub fn solve_patch(u0: &ScalarField, opts: &SolveOptions) -> Result<(ScalarField, SolveReport), SolverError> {
    solve_patch_with(u0, opts, &Sequential)
}

/// [`solve_patch`] with Jacobi sweeps dispatched through `exec`.
pub fn solve_patch_with(
    u0: &ScalarField,
    opts: &SolveOptions,
    exec: &dyn SweepExecutor,
) -> Result<(ScalarField, SolveReport), SolverError> {
    if !(opts.tolerance.is_finite() && opts.tolerance > 0.0) || opts.max_iterations == 0 {
        return Err(SolverError::InvalidOptions);
    }
    let patch = Patch::new(u0.window());
    if patch.len() == 0 {
        return Err(SolverError::InvalidPatch);
    }
    let mut u = u0.clone();
    let tol = opts.tolerance;
    let local_tol = 1e-3 * tol;
    let mut defect = patch.max_defect(u.values());
    let mut iterations = 0;
    let mut scratch = vec![0.0; patch.len()];

    while defect > tol && iterations < opts.max_iterations {
        match opts.mode {
            SolveMode::GaussSeidel => {
                for k in 0..patch.len() {
                    let (nb, s) = patch.gather(u.values(), k);
                    let s = relax_local(&nb, s, local_tol);
                    u.set_index(patch.interior[k], s);
                }
            }
            SolveMode::Jacobi => {
                {
                    let vals = u.values();
                    let p = &patch;
                    exec.run(&mut scratch, &|k| {
                        let (nb, s) = p.gather(vals, k);
                        relax_local(&nb, s, local_tol)
                    });
                }
                for (k, &s) in scratch.iter().enumerate() {
                    u.set_index(patch.interior[k], s);
                }
            }
            SolveMode::Newton => newton_step(&patch, &mut u, defect),
        }
        iterations += 1;
        defect = patch.max_defect(u.values());
    }

    let report = SolveReport {
        iterations,
        final_defect: defect,
        converged: defect <= tol,
    };
    if report.converged {
        Ok((u, report))
    } else {
        Err(SolverError::NonConvergence { report, field: u })
    }
}

/// One damped Newton step on all interior log-radii at once.
///
/// The Jacobian of the angle sums is symmetric; restricted to interior
/// vertices its negation is positive definite (rows are diagonally dominant
/// and strictly so next to the boundary), so the step solves by CG.
fn newton_step(patch: &Patch, u: &mut ScalarField, defect: f64) {
    let w = *u.window();
    let n = patch.len();
    let vals = u.values();
    let mut slot = vec![usize::MAX; w.len()];
    for (k, &i) in patch.interior.iter().enumerate() {
        slot[i] = k;
    }
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
    let mut rhs = Vec::with_capacity(n);
    for k in 0..n {
        let (nb, s) = patch.gather(vals, k);
        // -∂(angle sum)/∂u, accumulated per neighbor.
        let mut off = [0.0; 6];
        for i in 0..6 {
            let j = (i + 1) % 6;
            let a = nb[i] - s;
            let b = nb[j] - s;
            off[i] += dtheta_dx1_raw(a, b);
            off[j] += dtheta_dx1_raw(b, a);
        }
        let mut row = Vec::with_capacity(7);
        row.push((k, off.iter().sum::<f64>()));
        for (i, &o) in off.iter().enumerate() {
            let col = slot[patch.nbrs[k][i]];
            if col != usize::MAX {
                row.push((col, -o));
            }
        }
        rows.push(row);
        rhs.push(shifted_sum(&nb, s) - TAU);
    }
    let step = conjugate_gradient(&SparseMatrix::from_rows(&rows), &rhs, 1e-14);

    let base: Vec<f64> = patch.interior.iter().map(|&i| vals[i]).collect();
    let mut alpha = 1.0;
    for _ in 0..40 {
        for k in 0..n {
            u.set_index(patch.interior[k], base[k] + alpha * step[k]);
        }
        if patch.max_defect(u.values()) < defect {
            return;
        }
        alpha *= 0.5;
    }
}

/// Fills the interior of `u0` with the uniform-weight discrete harmonic
/// extension of its boundary values. Affine boundary data are reproduced
/// exactly, so spiral boundaries give the spiral itself.
pub fn harmonic_interpolation(u0: &ScalarField) -> ScalarField {
    let w = *u0.window();
    let patch = Patch::new(&w);
    let mut u = u0.clone();
    if patch.len() == 0 {
        return u;
    }
    let mut slot = vec![usize::MAX; w.len()];
    for (k, &i) in patch.interior.iter().enumerate() {
        slot[i] = k;
    }
    let vals = u0.values();
    let mut rows = Vec::with_capacity(patch.len());
    let mut rhs = Vec::with_capacity(patch.len());
    for k in 0..patch.len() {
        let mut row = vec![(k, 6.0)];
        let mut b = 0.0;
        for &j in &patch.nbrs[k] {
            if slot[j] == usize::MAX {
                b += vals[j];
            } else {
                row.push((slot[j], -1.0));
            }
        }
        rows.push(row);
        rhs.push(b);
    }
    let x = conjugate_gradient(&SparseMatrix::from_rows(&rows), &rhs, 1e-15);
    for (k, &i) in patch.interior.iter().enumerate() {
        u.set_index(i, x[k]);
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{angle_gradient_raw, inner_angles, LogRadiusTriple};
    use crate::lattice::faces_at;
    use crate::spiral::{spiral_field, SpiralParams};

    /// Angle sum from per-face inner angles, as a cross-check of the fused loop.
    fn face_angle_sum(u: &ScalarField, v: VertexId) -> f64 {
        faces_at(v)
            .iter()
            .map(|f| {
                let vals = u.face_values(f).unwrap();
                inner_angles(&LogRadiusTriple::new(vals[0], vals[1], vals[2]).unwrap())[0]
            })
            .sum()
    }

    #[test]
    fn regular_angle_sum() {
        let u = ScalarField::constant(Window::centered(3), 0.0).unwrap();
        for v in u.window().interior_vertices() {
            assert!((angle_sum(&u, v).unwrap() - TAU).abs() < 1e-14);
            assert!(angle_defect(&u, v).unwrap().abs() < 1e-14);
        }
    }

    #[test]
    fn spiral_angle_sum() {
        let u = spiral_field(&SpiralParams::new(1.0, 1.3, 0.9).unwrap(), Window::centered(4));
        for v in u.window().interior_vertices() {
            let s = angle_sum(&u, v).unwrap();
            assert!((s - TAU).abs() < 1e-12);
            assert!((s - face_angle_sum(&u, v)).abs() < 1e-14);
        }
    }

    #[test]
    fn bump_lowers_angle_sum() {
        let mut u = ScalarField::constant(Window::centered(2), 0.0).unwrap();
        u.set(VertexId::new(0, 0), 10.0).unwrap();
        assert!(angle_sum(&u, VertexId::new(0, 0)).unwrap() < TAU);
    }

    #[test]
    fn raising_a_solved_value_gives_positive_defect() {
        let mut u = spiral_field(&SpiralParams::new(1.0, 1.1, 0.95).unwrap(), Window::centered(3));
        let o = VertexId::new(0, 0);
        u.set(o, u.get(o).unwrap() + 0.05).unwrap();
        assert!(angle_defect(&u, o).unwrap() > 0.0);
    }

    #[test]
    fn boundary_vertex_rejected() {
        let u = ScalarField::constant(Window::centered(2), 0.0).unwrap();
        let b = VertexId::new(2, 0);
        assert_eq!(angle_sum(&u, b), Err(SolverError::NotInterior(b)));
        assert!(angle_defect(&u, VertexId::new(9, 9)).is_err());
    }

    #[test]
    fn local_relaxation_hits_target() {
        let nb = [0.3, -0.2, 1.5, -2.0, 0.7, 0.0];
        for s0 in [-30.0, -1.0, 0.0, 4.0, 40.0] {
            let s = relax_local(&nb, s0, 1e-14);
            assert!((shifted_sum(&nb, s) - TAU).abs() < 1e-13, "from {s0}");
        }
    }

    #[test]
    fn diagonal_derivative_negative() {
        // Pseudo-random states from a fixed LCG.
        let mut state: u64 = 0x2545_f491_4f6c_dd1d;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 10.0 - 5.0
        };
        for _ in 0..1000 {
            let u = [next(), next(), next()];
            for i in 0..3 {
                assert!(angle_gradient_raw(&u, i).as_array()[i] < 0.0);
            }
            let nb = [next(), next(), next(), next(), next(), next()];
            assert!(shifted_sum_slope(&nb, next()) < 0.0);
        }
    }

    #[test]
    fn empty_interior_is_invalid() {
        let u = ScalarField::constant(Window::new(0, 1, 0, 5).unwrap(), 0.0).unwrap();
        assert_eq!(
            solve_patch(&u, &SolveOptions::default()),
            Err(SolverError::InvalidPatch)
        );
    }

    #[test]
    fn options_validated() {
        assert!(SolveOptions::new(0.0, 10, SolveMode::Jacobi).is_err());
        assert!(SolveOptions::new(1e-10, 0, SolveMode::Jacobi).is_err());
        assert!(SolveOptions::new(1e-10, 1, SolveMode::Newton).is_ok());
    }

    #[test]
    fn regular_recovered_from_noise() {
        let w = Window::centered(5);
        let mut state: u32 = 7;
        let u0 = ScalarField::from_fn(w, |v| {
            if w.is_interior(v) {
                state = state.wrapping_mul(1664525).wrapping_add(1013904223);
                (state >> 8) as f64 / (1u32 << 24) as f64 * 2.0 - 1.0
            } else {
                0.0
            }
        })
        .unwrap();
        for mode in [SolveMode::GaussSeidel, SolveMode::Jacobi, SolveMode::Newton] {
            // Field error is the defect amplified by the inverse Jacobian,
            // so ask for a defect well below the target error.
            let opts = SolveOptions::new(1e-12, 100_000, mode).unwrap();
            let (u, report) = solve_patch(&u0, &opts).unwrap();
            assert!(report.converged);
            assert!(u.values().iter().all(|x| x.abs() < 1e-10), "{mode:?}");
        }
    }

    #[test]
    fn spiral_recovered_in_every_mode() {
        let w = Window::centered(5);
        let exact = spiral_field(&SpiralParams::new(1.0, 1.2, 0.85).unwrap(), w);
        let u0 = ScalarField::from_fn(w, |v| if w.is_interior(v) { 0.0 } else { exact.get(v).unwrap() }).unwrap();
        for mode in [SolveMode::GaussSeidel, SolveMode::Jacobi, SolveMode::Newton] {
            let opts = SolveOptions {
                mode,
                ..SolveOptions::default()
            };
            let (u, report) = solve_patch(&u0, &opts).unwrap();
            assert!(report.final_defect <= 1e-10);
            assert!(u.max_abs_diff(&exact).unwrap() < 1e-8, "{mode:?}");
            for v in w.boundary_vertices() {
                assert_eq!(u.get(v).unwrap().to_bits(), u0.get(v).unwrap().to_bits());
            }
        }
    }

    #[test]
    fn non_convergence_returns_partial_field() {
        let w = Window::centered(6);
        let u0 = ScalarField::from_fn(w, |v| if w.is_interior(v) { 3.0 } else { 0.0 }).unwrap();
        let opts = SolveOptions::new(1e-12, 1, SolveMode::GaussSeidel).unwrap();
        match solve_patch(&u0, &opts) {
            Err(SolverError::NonConvergence { report, field }) => {
                assert_eq!(report.iterations, 1);
                assert!(!report.converged);
                assert!(report.final_defect > 1e-12);
                assert_ne!(&field, &u0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn solved_input_takes_no_iterations() {
        let u = spiral_field(&SpiralParams::new(2.0, 1.1, 0.9).unwrap(), Window::centered(4));
        let (_, report) = solve_patch(&u, &SolveOptions::default()).unwrap();
        assert_eq!(report.iterations, 0);
    }

    #[test]
    fn harmonic_interpolation_reproduces_affine_data() {
        let w = Window::new(-4, 6, -3, 5).unwrap();
        let exact = spiral_field(&SpiralParams::new(1.5, 1.4, 0.7).unwrap(), w);
        let u0 = ScalarField::from_fn(w, |v| if w.is_interior(v) { 9.0 } else { exact.get(v).unwrap() }).unwrap();
        let h = harmonic_interpolation(&u0);
        assert!(h.max_abs_diff(&exact).unwrap() < 1e-13);
    }
}
