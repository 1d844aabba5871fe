//! Gauss–Legendre rules on the unit interval.

use alloc::vec::Vec;
use core::f64::consts::PI;

/// Nodes and weights of an `order`-point Gauss–Legendre rule on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Evaluates `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

impl GaussLegendre {
    /// Panics if `order == 0`.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "quadrature order must be positive");
        let mut nodes = Vec::with_capacity(order);
        let mut weights = Vec::with_capacity(order);
        if order == 1 {
            nodes.push(0.5);
            weights.push(1.0);
            return Self { nodes, weights };
        }
        let nf = order as f64;
        // Roots of P_n on [-1, 1], largest first; Newton from the Tricomi guess.
        for i in 1..=order {
            let mut x = libm::cos(PI * (i as f64 - 0.25) / (nf + 0.5));
            for _ in 0..100 {
                let (p, dp) = legendre(order, x);
                let step = p / dp;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre(order, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // Map [-1, 1] to [0, 1].
            nodes.push(0.5 * (1.0 - x));
            weights.push(0.5 * w);
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫_0^1 f(t) dt`.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }
}
