//! Second compounds: the exterior square `u ∧ v` and the second additive
//! compound `A^{[2]}` with `e^{A^{[2]} t} = (e^{At})^{(2)}`.
//!
//! Pairs `(i, j)`, `i < j`, are ordered lexicographically.

use super::matrix::Matrix;
use crate::scalar::Real;

pub fn pair_index(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            out.push((i, j));
        }
    }
    out
}

/// `(u ∧ v)_{(i,j)} = u_i v_j - u_j v_i`
pub fn wedge<S: Real>(u: &[S], v: &[S]) -> Vec<S> {
    pair_index(u.len())
        .into_iter()
        .map(|(i, j)| u[i] * v[j] - u[j] * v[i])
        .collect()
}

pub fn additive_compound2<S: Real>(a: &Matrix<S>) -> Matrix<S> {
    let n = a.rows();
    let pairs = pair_index(n);
    let m = pairs.len();
    let mut out = Matrix::zeros(m, m);
    for (r, &(i, j)) in pairs.iter().enumerate() {
        for (s, &(k, l)) in pairs.iter().enumerate() {
            out[(r, s)] = if (i, j) == (k, l) {
                a[(i, i)] + a[(j, j)]
            } else if i == k {
                a[(j, l)]
            } else if j == l {
                a[(i, k)]
            } else if i == l {
                -a[(j, k)]
            } else if j == k {
                -a[(i, l)]
            } else {
                S::zero()
            };
        }
    }
    out
}

/// Multiplicative compound `X^{(2)}`: all 2x2 minors of a square matrix.
pub fn multiplicative_compound2<S: Real>(x: &Matrix<S>) -> Matrix<S> {
    let pairs = pair_index(x.rows());
    let m = pairs.len();
    let mut out = Matrix::zeros(m, m);
    for (r, &(i, j)) in pairs.iter().enumerate() {
        for (s, &(k, l)) in pairs.iter().enumerate() {
            out[(r, s)] = x[(i, k)] * x[(j, l)] - x[(i, l)] * x[(j, k)];
        }
    }
    out
}
