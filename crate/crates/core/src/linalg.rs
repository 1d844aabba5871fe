//! Sparse symmetric positive definite systems, solved by conjugate gradients.

use alloc::vec;
use alloc::vec::Vec;

/// Compressed sparse rows; callers supply both triangles.
#[derive(Debug, Clone)]
pub(crate) struct SparseMatrix {
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseMatrix {
    /// `rows[i]` lists `(column, value)` pairs of row `i`.
    pub(crate) fn from_rows(rows: &[Vec<(usize, f64)>]) -> Self {
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for row in rows {
            for &(c, v) in row {
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        Self { row_ptr, cols, vals }
    }

    pub(crate) fn dim(&self) -> usize {
        self.row_ptr.len() - 1
    }

    fn mul_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
            *yi = self.cols[a..b]
                .iter()
                .zip(&self.vals[a..b])
                .map(|(&c, &v)| v * x[c])
                .sum();
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `A x = b` for SPD `A` from a zero start. Stops when the residual
/// norm drops below `rel_tol * |b|` or after `10 n` iterations.
pub(crate) fn conjugate_gradient(a: &SparseMatrix, b: &[f64], rel_tol: f64) -> Vec<f64> {
    let n = a.dim();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let bnorm = libm::sqrt(dot(b, b));
    if bnorm == 0.0 {
        return x;
    }
    let mut rr = dot(&r, &r);
    for _ in 0..(10 * n).max(10) {
        if libm::sqrt(rr) <= rel_tol * bnorm {
            break;
        }
        a.mul_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            break;
        }
        let alpha = rr / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_tridiagonal() {
        let n = 50;
        let rows: Vec<Vec<(usize, f64)>> = (0..n)
            .map(|i| {
                let mut r = vec![(i, 2.0)];
                if i > 0 {
                    r.push((i - 1, -1.0));
                }
                if i + 1 < n {
                    r.push((i + 1, -1.0));
                }
                r
            })
            .collect();
        let a = SparseMatrix::from_rows(&rows);
        let b: Vec<f64> = (0..n).map(|i| libm::sin(i as f64)).collect();
        let x = conjugate_gradient(&a, &b, 1e-14);
        let mut ax = vec![0.0; n];
        a.mul_into(&x, &mut ax);
        for (u, v) in ax.iter().zip(&b) {
            assert!((u - v).abs() < 1e-12);
        }
    }
}
