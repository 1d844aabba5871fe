//! Doyle spirals: radii `r_{m,n} = r0 x^m y^n`, i.e. log-radius fields that
//! are affine in `(m, n)`.

use core::f64::consts::TAU;
use core::fmt;

use crate::geometry::theta_raw;
use crate::lattice::{d1, d2, LatticeError, ScalarField, Window};

/// Default spread tolerance for [`classify`].
pub const DEFAULT_CLASSIFY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpiralParams {
    r0: f64,
    x: f64,
    y: f64,
}

impl SpiralParams {
    pub fn new(r0: f64, x: f64, y: f64) -> Result<Self, SpiralError> {
        for (name, value) in [("r0", r0), ("x", x), ("y", y)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(SpiralError::InvalidParameter { name, value });
            }
        }
        Ok(Self { r0, x, y })
    }

    pub fn regular() -> Self {
        Self {
            r0: 1.0,
            x: 1.0,
            y: 1.0,
        }
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    /// `(ln r0, ln x, ln y)`.
    pub fn logs(&self) -> (f64, f64, f64) {
        (libm::log(self.r0), libm::log(self.x), libm::log(self.y))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Classification {
    Regular,
    /// Constant differences `D1 u ≡ k1`, `D2 u ≡ k2`.
    Spiral { k1: f64, k2: f64 },
    /// Neither difference is constant; carries the larger max−min spread.
    Other { spread: f64 },
}

impl Classification {
    pub fn label(&self) -> &'static str {
        match self {
            Classification::Regular => "regular",
            Classification::Spiral { .. } => "spiral",
            Classification::Other { .. } => "other",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpiralError {
    InvalidParameter { name: &'static str, value: f64 },
    /// The flower angle sum did not change sign on the search interval.
    BracketFailed { lo: f64, hi: f64 },
    WindowTooSmall,
    Lattice(LatticeError),
}

impl fmt::Display for SpiralError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpiralError::InvalidParameter { name, value } => {
                write!(f, "spiral parameter {name} must be positive and finite, got {value}")
            }
            SpiralError::BracketFailed { lo, hi } => {
                write!(f, "flower closure not bracketed on [{lo}, {hi}]")
            }
            SpiralError::WindowTooSmall => f.write_str("classification needs a window at least 2x2"),
            SpiralError::Lattice(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for SpiralError {}

impl From<LatticeError> for SpiralError {
    fn from(e: LatticeError) -> Self {
        SpiralError::Lattice(e)
    }
}

/// `u_{m,n} = ln r0 + m ln x + n ln y` on every vertex of `window`.
pub fn spiral_field(p: &SpiralParams, window: Window) -> ScalarField {
    let (l0, a, b) = p.logs();
    ScalarField::from_fn(window, |v| l0 + v.m as f64 * a + v.n as f64 * b)
        .expect("spiral log-radii are finite")
}

/// Angle sum at a center of log-radius 0 whose six neighbors (in
/// counterclockwise order) have the given log-radii.
pub(crate) fn flower_sum(nb: &[f64; 6]) -> f64 {
    (0..6).map(|i| theta_raw(nb[i], nb[(i + 1) % 6])).sum()
}

/// Angle sum at a vertex of a spiral flower with `D1 u ≡ a`, `D2 u ≡ b`.
pub fn flower_angle_sum(a: f64, b: f64) -> f64 {
    flower_sum(&[a, b, b - a, -a, -b, a - b])
}

const CLOSURE_BRACKET: (f64, f64) = (-50.0, 50.0);

/// Angle sum at `v_{0,0}` for the flower with `u_{m,0} = k1 m`,
/// `u_{m,1} = a1 + k1 m` and `u_{m,-1} = a2 + k1 m`.
pub fn closure_flower_sum(a1: f64, k1: f64, a2: f64) -> f64 {
    flower_sum(&[k1, a1, a1 - k1, -k1, a2, a2 + k1])
}

/// The `a2` that closes the flower of [`closure_flower_sum`] at `2π`.
///
/// The three face angles at the center that touch row `n = -1` increase with
/// `a2` and the others do not depend on it, so the root is unique and is
/// found by bisection on `[-50, 50]`.
pub fn solve_flower_closure(a1: f64, k1: f64) -> Result<f64, SpiralError> {
    let (mut lo, mut hi) = CLOSURE_BRACKET;
    let g = |a2: f64| closure_flower_sum(a1, k1, a2) - TAU;
    let (glo, ghi) = (g(lo), g(hi));
    if !(glo < 0.0 && ghi > 0.0) {
        return Err(SpiralError::BracketFailed { lo, hi });
    }
    let mut best = if -glo < ghi { (lo, glo) } else { (hi, ghi) };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid);
        if gm.abs() < best.1.abs() {
            best = (mid, gm);
        }
        if gm == 0.0 {
            break;
        } else if gm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(best.0)
}

fn spread_and_mean(f: &ScalarField) -> (f64, f64) {
    let vals = f.values();
    let (lo, hi, sum) = vals
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY, 0.0), |(lo, hi, s), &x| {
            (lo.min(x), hi.max(x), s + x)
        });
    (hi - lo, sum / vals.len() as f64)
}

/// Regular, spiral or neither, judged by the max−min spread of `D1 u` and
/// `D2 u` against `tol`.
pub fn classify(u: &ScalarField, tol: f64) -> Result<Classification, SpiralError> {
    let w = u.window();
    if w.width() < 2 || w.height() < 2 {
        return Err(SpiralError::WindowTooSmall);
    }
    let (s1, k1) = spread_and_mean(&d1(u)?);
    let (s2, k2) = spread_and_mean(&d2(u)?);
    Ok(if s1 <= tol && s2 <= tol {
        if k1.abs() <= tol && k2.abs() <= tol {
            Classification::Regular
        } else {
            Classification::Spiral { k1, k2 }
        }
    } else {
        Classification::Other {
            spread: s1.max(s2),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::VertexId;

    #[test]
    fn params_validated() {
        assert!(SpiralParams::new(1.0, 0.0, 1.0).is_err());
        assert!(SpiralParams::new(-1.0, 1.0, 1.0).is_err());
        assert!(SpiralParams::new(1.0, 1.0, f64::NAN).is_err());
        match SpiralParams::new(1.0, 1.0, -2.0) {
            Err(SpiralError::InvalidParameter { name, .. }) => assert_eq!(name, "y"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn regular_spiral_is_zero() {
        let f = spiral_field(&SpiralParams::regular(), Window::centered(4));
        assert!(f.values().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn spiral_substitution() {
        let p = SpiralParams::new(1.0, core::f64::consts::E, 1.0).unwrap();
        let f = spiral_field(&p, Window::centered(4));
        assert!((f.get(VertexId::new(3, 0)).unwrap() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn spiral_differences_are_constant() {
        let p = SpiralParams::new(2.0, 1.3, 0.6).unwrap();
        let w = Window::new(-5, 7, -3, 2).unwrap();
        let f = spiral_field(&p, w);
        let (_, a, b) = p.logs();
        assert!(d1(&f).unwrap().values().iter().all(|&x| (x - a).abs() < 1e-13));
        assert!(d2(&f).unwrap().values().iter().all(|&x| (x - b).abs() < 1e-13));
    }

    #[test]
    fn flower_sum_regular() {
        assert!((flower_angle_sum(0.0, 0.0) - TAU).abs() < 1e-14);
    }

    #[test]
    fn flower_sum_spiral() {
        let a = libm::log(1.5);
        let b = libm::log(0.8);
        assert!((flower_angle_sum(a, b) - TAU).abs() < 1e-12);
    }

    #[test]
    fn flower_sum_swap_symmetry() {
        for i in 0..21 {
            for j in 0..21 {
                let a = -2.0 + 0.2 * i as f64;
                let b = -2.0 + 0.2 * j as f64;
                assert!((flower_angle_sum(a, b) - flower_angle_sum(b, a)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn closure_examples() {
        assert!(solve_flower_closure(0.0, 0.0).unwrap().abs() < 1e-12);
        let a2 = solve_flower_closure(0.3, 0.1).unwrap();
        assert!((a2 + 0.3).abs() < 1e-10);
        assert!((closure_flower_sum(0.3, 0.1, a2) - TAU).abs() < 1e-13);
    }

    #[test]
    fn closure_sum_increases_in_a2() {
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=100 {
            let a2 = -5.0 + 0.1 * i as f64;
            let s = closure_flower_sum(0.4, -0.7, a2);
            assert!(s > prev);
            prev = s;
        }
    }

    #[test]
    fn classify_examples() {
        let p = SpiralParams::new(1.0, 2.0, 0.7).unwrap();
        let f = spiral_field(&p, Window::centered(5));
        match classify(&f, DEFAULT_CLASSIFY_TOL).unwrap() {
            Classification::Spiral { k1, k2 } => {
                assert!((k1 - libm::log(2.0)).abs() < 1e-12);
                assert!((k2 - libm::log(0.7)).abs() < 1e-12);
            }
            c => panic!("expected spiral, got {c:?}"),
        }
        let c = ScalarField::constant(Window::centered(3), 5.0).unwrap();
        assert_eq!(classify(&c, DEFAULT_CLASSIFY_TOL).unwrap(), Classification::Regular);
        // D1 u = 2m + 1 on m in {-1, 0} spans [-1, 1].
        let q = ScalarField::from_fn(Window::new(-1, 1, 0, 2).unwrap(), |v| (v.m * v.m) as f64).unwrap();
        match classify(&q, DEFAULT_CLASSIFY_TOL).unwrap() {
            Classification::Other { spread } => assert!(spread >= 2.0),
            c => panic!("expected other, got {c:?}"),
        }
    }

    #[test]
    fn classify_needs_two_by_two() {
        let f = ScalarField::constant(Window::new(0, 0, 0, 5).unwrap(), 0.0).unwrap();
        assert_eq!(classify(&f, 1e-9), Err(SpiralError::WindowTooSmall));
    }
}
