use super::eigen::spectral_abscissa;
use super::lu::Lu;
use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::scalar::{Real, Tolerances};

/// Solves `A P + P Aᵀ = -b bᵀ` for Hurwitz `A` with default tolerances.
pub fn solve_lyapunov<S: Real>(a: &Matrix<S>, b: &[S]) -> Result<Matrix<S>> {
    solve_lyapunov_with(a, b, &Tolerances::default())
}

/// Vectorized solve: `(A ⊕ A) vec(P) = -vec(b bᵀ)` by dense LU, then
/// symmetrization and a residual check against `tol.lyap_tol`.
pub fn solve_lyapunov_with<S: Real>(a: &Matrix<S>, b: &[S], tol: &Tolerances<S>) -> Result<Matrix<S>> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "Lyapunov solve needs square A, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    if b.len() != n {
        return Err(Error::Dimension(format!("b has length {}, expected {n}", b.len())));
    }
    let alpha = spectral_abscissa(a)?;
    if alpha >= S::zero() {
        return Err(Error::NotHurwitz {
            abscissa: alpha.as_f64(),
            offending: super::eigen::eigenvalues(a)?
                .into_iter()
                .filter(|z| z.re >= S::zero())
                .map(|z| (z.re.as_f64(), z.im.as_f64()))
                .collect(),
        });
    }

    let nn = n * n;
    let mut kron = vec![S::zero(); nn * nn];
    for i in 0..n {
        for j in 0..n {
            let row = i * n + j;
            for k in 0..n {
                // A_ik δ_jl
                kron[row * nn + k * n + j] += a[(i, k)];
                // δ_ik A_jl
                kron[row * nn + i * n + k] += a[(j, k)];
            }
        }
    }
    let rhs: Vec<S> = (0..nn).map(|idx| -b[idx / n] * b[idx % n]).collect();
    let lu = Lu::factor(nn, kron)?;
    let p = Matrix::from_row_major(n, n, lu.solve(&rhs))?.symmetrized();

    let residual = lyapunov_residual(a, &p, b);
    // ||b bᵀ||_F = ||b||²
    let bnorm = b.iter().map(|&x| x * x).sum::<S>();
    if bnorm > S::zero() && !(residual <= tol.lyap_tol * bnorm) {
        return Err(Error::Numerical(format!(
            "Lyapunov residual {} exceeds {} relative to ||b b^T|| = {}",
            residual, tol.lyap_tol, bnorm
        )));
    }
    Ok(p)
}

/// Frobenius norm of `A P + P Aᵀ + b bᵀ`.
pub fn lyapunov_residual<S: Real>(a: &Matrix<S>, p: &Matrix<S>, b: &[S]) -> S {
    let ap = a * p;
    let apt = ap.transpose();
    let n = a.rows();
    let mut acc = S::zero();
    for i in 0..n {
        for j in 0..n {
            let r = ap[(i, j)] + apt[(i, j)] + b[i] * b[j];
            acc += r * r;
        }
    }
    acc.sqrt()
}
