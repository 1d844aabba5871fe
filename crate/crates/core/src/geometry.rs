//! Angles of Euclidean triangles spanned by three mutually tangent circles.
//!
//! A triangle with circle radii `r1, r2, r3` has side lengths `r1 + r2`,
//! `r1 + r3`, `r2 + r3`. Its angles are invariant under a common scaling of
//! the radii, so the angle at vertex `i` depends only on the log-radius
//! differences `u_j - u_i` and `u_k - u_i` through the function [`theta`].

use core::fmt;

/// Finite log-radii `(u1, u2, u3)` of the three circles of a face.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogRadiusTriple {
    u: [f64; 3],
}

impl LogRadiusTriple {
    pub fn new(u1: f64, u2: f64, u3: f64) -> Result<Self, GeometryError> {
        if u1.is_finite() && u2.is_finite() && u3.is_finite() {
            Ok(Self { u: [u1, u2, u3] })
        } else {
            Err(GeometryError::NonFinite)
        }
    }

    /// Caller guarantees finiteness (values taken from a validated field).
    pub(crate) fn from_array_unchecked(u: [f64; 3]) -> Self {
        debug_assert!(u.iter().all(|x| x.is_finite()));
        Self { u }
    }

    pub fn as_array(&self) -> [f64; 3] {
        self.u
    }

    /// Triple shifted by `lambda` in every component.
    pub fn shifted(&self, lambda: f64) -> Result<Self, GeometryError> {
        Self::new(self.u[0] + lambda, self.u[1] + lambda, self.u[2] + lambda)
    }

    /// Radii `e^{u_i}`.
    pub fn radii(&self) -> [f64; 3] {
        self.u.map(libm::exp)
    }
}

/// Partial derivatives `(∂θ_i/∂u_1, ∂θ_i/∂u_2, ∂θ_i/∂u_3)` of one inner angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleGradient {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

impl AngleGradient {
    pub fn as_array(&self) -> [f64; 3] {
        [self.d1, self.d2, self.d3]
    }

    pub fn sum(&self) -> f64 {
        self.d1 + self.d2 + self.d3
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeometryError {
    NonFinite,
    /// Vertex index outside `1..=3`.
    VertexIndex(usize),
}

impl fmt::Display for GeometryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometryError::NonFinite => f.write_str("non-finite log-radius"),
            GeometryError::VertexIndex(i) => write!(f, "vertex index {i} not in 1..=3"),
        }
    }
}

impl core::error::Error for GeometryError {}

/// Logistic function `e^x / (1 + e^x)`, evaluated without overflow.
#[inline]
fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + libm::exp(-x))
    } else {
        let e = libm::exp(x);
        e / (1.0 + e)
    }
}

/// `ln(1 + e^a + e^b)` without overflow.
#[inline]
fn log1p_exp2(a: f64, b: f64) -> f64 {
    let m = a.max(b).max(0.0);
    m + libm::log(libm::exp(-m) + libm::exp(a - m) + libm::exp(b - m))
}

// With e1 = e^{x1}, e2 = e^{x2} the cosine-law quotient
//
//   ((1+e1)^2 + (1+e2)^2 - (e1+e2)^2) / (2 (1+e1)(1+e2))
//
// expands to (1 + e1 + e2 - e1 e2) / ((1+e1)(1+e2)) = 1 - 2 p q with
// p = e1/(1+e1), q = e2/(1+e2). Hence sin^2(Θ/2) = p q and
// cos^2(Θ/2) = 1 - p q = (1-p) + p (1-q), and
//
//   Θ = 2 atan2(sqrt(p q), sqrt((1-p) + p (1-q))).
//
// Only logistic values in [0, 1] appear, so this form never overflows for
// any |x| and keeps full relative accuracy for angles near 0 and near π.
#[inline]
pub(crate) fn theta_raw(x1: f64, x2: f64) -> f64 {
    let p = sigmoid(x1);
    let q = sigmoid(x2);
    let sin_half = libm::sqrt(p * q);
    let cos_half = libm::sqrt(sigmoid(-x1) + p * sigmoid(-x2));
    2.0 * libm::atan2(sin_half, cos_half)
}

// ∂Θ/∂x1 = 1/(1+e1) * sqrt(e1 e2 / (1 + e1 + e2)); the square root is taken
// in log space.
#[inline]
pub(crate) fn dtheta_dx1_raw(x1: f64, x2: f64) -> f64 {
    let log_ratio = x1 + x2 - log1p_exp2(x1, x2);
    sigmoid(-x1) * libm::exp(0.5 * log_ratio)
}

/// Angle at the vertex whose neighbors in the face have log-radius offsets
/// `x1` and `x2` relative to it. Symmetric, and strictly inside `(0, π)`.
pub fn theta(x1: f64, x2: f64) -> Result<f64, GeometryError> {
    if !(x1.is_finite() && x2.is_finite()) {
        return Err(GeometryError::NonFinite);
    }
    Ok(theta_raw(x1, x2))
}

/// `∂Θ/∂x1`. Lies in `(0, 1)` for moderate arguments and underflows to zero
/// only when `x1` or `-x2` is huge.
pub fn dtheta_dx1(x1: f64, x2: f64) -> Result<f64, GeometryError> {
    if !(x1.is_finite() && x2.is_finite()) {
        return Err(GeometryError::NonFinite);
    }
    Ok(dtheta_dx1_raw(x1, x2))
}

/// Inner angles `(θ1, θ2, θ3)` of the face, `θ_i = Θ(u_j - u_i, u_k - u_i)`.
pub fn inner_angles(u: &LogRadiusTriple) -> [f64; 3] {
    let [u1, u2, u3] = u.u;
    [
        theta_raw(u2 - u1, u3 - u1),
        theta_raw(u1 - u2, u3 - u2),
        theta_raw(u1 - u3, u2 - u3),
    ]
}

/// Gradient of the angle at vertex `i` (1-based) with respect to `(u1, u2, u3)`.
///
/// Off-diagonal entries come from `∂Θ/∂x1` at the matching argument order;
/// the diagonal is their negated sum, since the angle is invariant under
/// a common shift of all three log-radii.
pub fn angle_gradient(u: &LogRadiusTriple, i: usize) -> Result<AngleGradient, GeometryError> {
    if !(1..=3).contains(&i) {
        return Err(GeometryError::VertexIndex(i));
    }
    Ok(angle_gradient_raw(&u.u, i - 1))
}

/// 0-based variant shared by the solver and the harmonic weights.
#[inline]
pub(crate) fn angle_gradient_raw(u: &[f64; 3], i: usize) -> AngleGradient {
    let j = (i + 1) % 3;
    let k = (i + 2) % 3;
    let xj = u[j] - u[i];
    let xk = u[k] - u[i];
    let mut d = [0.0; 3];
    d[j] = dtheta_dx1_raw(xj, xk);
    d[k] = dtheta_dx1_raw(xk, xj);
    d[i] = -(d[j] + d[k]);
    AngleGradient {
        d1: d[0],
        d2: d[1],
        d3: d[2],
    }
}
