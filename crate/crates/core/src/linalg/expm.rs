//! Matrix exponential by scaling and squaring with the degree-13 diagonal
//! Padé approximant.

use super::lu::Lu;
use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// Largest 1-norm for which the unscaled degree-13 approximant is accurate to
/// double precision.
const THETA13: f64 = 5.371_920_351_148_152;

/// `e^{A t}`
pub fn expm<S: Real>(a: &Matrix<S>, t: S) -> Result<Matrix<S>> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "matrix exponential of non-square {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("non-finite time {t}")));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(Matrix::zeros(0, 0));
    }
    if t == S::zero() {
        return Ok(Matrix::identity(n));
    }
    if n == 1 {
        let v = (a[(0, 0)] * t).exp();
        return finite_or_overflow(Matrix::from_row_major(1, 1, vec![v])?, a, t);
    }

    let at = a.scale(t);
    let norm = at.norm_1();
    let squarings = if norm.as_f64() > THETA13 {
        (norm.as_f64() / THETA13).log2().ceil() as i32
    } else {
        0
    };
    if squarings > 1000 {
        return Err(Error::Numerical(format!(
            "matrix exponential argument too large (||A t||_1 = {})",
            norm
        )));
    }
    let scaled = at.scale(S::lit(2.0).powi(-squarings));
    let mut result = pade13(&scaled)?;
    for _ in 0..squarings {
        result = &result * &result;
    }
    finite_or_overflow(result, a, t)
}

fn finite_or_overflow<S: Real>(m: Matrix<S>, a: &Matrix<S>, t: S) -> Result<Matrix<S>> {
    if m.is_finite() {
        Ok(m)
    } else {
        Err(Error::Numerical(format!(
            "matrix exponential overflowed (||A||_1 = {}, t = {})",
            a.norm_1(),
            t
        )))
    }
}

fn pade13<S: Real>(a: &Matrix<S>) -> Result<Matrix<S>> {
    let n = a.rows();
    let b: Vec<S> = PADE13.iter().map(|&x| S::lit(x)).collect();
    let ident = Matrix::identity(n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;

    let lincomb = |c6: S, c4: S, c2: S, c0: S| -> Matrix<S> {
        let mut m = a6.scale(c6);
        m = &m + &a4.scale(c4);
        m = &m + &a2.scale(c2);
        &m + &ident.scale(c0)
    };

    let u_inner = &(&a6 * &lincomb(b[13], b[11], b[9], S::zero())) + &lincomb(b[7], b[5], b[3], b[1]);
    let u = a * &u_inner;
    let v = &(&a6 * &lincomb(b[12], b[10], b[8], S::zero())) + &lincomb(b[6], b[4], b[2], b[0]);

    let num = &v + &u;
    let den = &v - &u;
    let lu = Lu::from_matrix(&den)
        .map_err(|_| Error::Numerical("singular Padé denominator in matrix exponential".into()))?;
    Ok(lu.solve_matrix(&num))
}
