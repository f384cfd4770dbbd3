//! LU factorization with partial pivoting over real or complex entries.

use num_complex::Complex;
use num_traits::{One, Zero};
use std::ops::{Div, Mul, Sub};

use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Entry type admissible for [`Lu`].
pub trait LuEntry<S: Real>:
    Copy + Zero + One + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self>
{
    fn modulus(self) -> S;
}

impl<S: Real> LuEntry<S> for S {
    #[inline]
    fn modulus(self) -> S {
        self.abs()
    }
}

impl<S: Real> LuEntry<S> for Complex<S> {
    #[inline]
    fn modulus(self) -> S {
        self.norm()
    }
}

/// Packed `PA = LU` factorization of an `n x n` matrix.
#[derive(Debug, Clone)]
pub struct Lu<S, T> {
    n: usize,
    lu: Vec<T>,
    perm: Vec<usize>,
    /// 1-norm of the factored matrix, kept for condition estimates.
    anorm: S,
}

impl<S: Real, T: LuEntry<S>> Lu<S, T> {
    /// Factors the row-major `n x n` matrix `a`.
    pub fn factor(n: usize, mut a: Vec<T>) -> Result<Self> {
        if a.len() != n * n {
            return Err(Error::Dimension(format!(
                "LU needs {} entries, got {}",
                n * n,
                a.len()
            )));
        }
        let anorm = (0..n)
            .map(|j| (0..n).map(|i| a[i * n + j].modulus()).sum::<S>())
            .fold(S::zero(), S::max);
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, a[i * n + k].modulus()))
                .fold((k, -S::one()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax == S::zero() || !pmax.is_finite() {
                return Err(Error::Numerical(format!(
                    "singular matrix in LU (zero pivot in column {k})"
                )));
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = a[k * n + k];
            for i in (k + 1)..n {
                let f = a[i * n + k] / pivot;
                a[i * n + k] = f;
                if f.modulus() == S::zero() {
                    continue;
                }
                for j in (k + 1)..n {
                    let v = a[k * n + j];
                    a[i * n + j] = a[i * n + j] - f * v;
                }
            }
        }
        Ok(Self {
            n,
            lu: a,
            perm,
            anorm,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        assert_eq!(b.len(), n, "rhs length");
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s = s - self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..n {
                s = s - self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
        x
    }

    /// Explicit inverse, column by column. Row-major output.
    pub fn inverse(&self) -> Vec<T> {
        let n = self.n;
        let mut inv = vec![T::zero(); n * n];
        let mut e = vec![T::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = T::zero());
            e[j] = T::one();
            let col = self.solve(&e);
            for i in 0..n {
                inv[i * n + j] = col[i];
            }
        }
        inv
    }

    /// 1-norm condition number computed from the explicit inverse.
    /// Fine for the small systems handled here.
    pub fn condition_1(&self) -> S {
        let n = self.n;
        let inv = self.inverse();
        let inorm = (0..n)
            .map(|j| (0..n).map(|i| inv[i * n + j].modulus()).sum::<S>())
            .fold(S::zero(), S::max);
        self.anorm * inorm
    }
}

impl<S: Real> Lu<S, S> {
    pub fn from_matrix(m: &Matrix<S>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension(format!(
                "LU of non-square {}x{} matrix",
                m.rows(),
                m.cols()
            )));
        }
        Self::factor(m.rows(), m.as_slice().to_vec())
    }

    /// Solves `A X = B` for a matrix right-hand side.
    pub fn solve_matrix(&self, b: &Matrix<S>) -> Matrix<S> {
        let n = self.n;
        assert_eq!(b.rows(), n);
        let mut out = Matrix::zeros(n, b.cols());
        let mut col = vec![S::zero(); n];
        for j in 0..b.cols() {
            for i in 0..n {
                col[i] = b[(i, j)];
            }
            let x = self.solve(&col);
            for i in 0..n {
                out[(i, j)] = x[i];
            }
        }
        out
    }

    pub fn inverse_matrix(&self) -> Matrix<S> {
        Matrix::from_row_major(self.n, self.n, self.inverse())
            .expect("inverse of a factored matrix has the right shape")
    }
}
