use num_complex::Complex;

use super::lu::Lu;
use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Solution of `(iωI - A) x = b` together with its conditioning.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolventSolution<S> {
    pub x: Vec<Complex<S>>,
    /// 1-norm condition number of `iωI - A`.
    pub condition: S,
    /// Set when `condition` exceeds [`ill_conditioning_threshold`].
    pub ill_conditioned: bool,
}

pub fn ill_conditioning_threshold<S: Real>() -> S {
    S::lit(0.01) / S::epsilon()
}

pub fn resolvent_apply<S: Real>(a: &Matrix<S>, b: &[S], omega: S) -> Result<ResolventSolution<S>> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "resolvent of non-square {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    if b.len() != n {
        return Err(Error::Dimension(format!("b has length {}, expected {n}", b.len())));
    }
    let mut m = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let diag = if i == j { omega } else { S::zero() };
            m.push(Complex::new(-a[(i, j)], diag));
        }
    }
    let lu = Lu::<S, Complex<S>>::factor(n, m)
        .map_err(|_| Error::Numerical(format!("iω = {omega}i is an eigenvalue of A")))?;
    let rhs: Vec<Complex<S>> = b.iter().map(|&v| Complex::new(v, S::zero())).collect();
    let x = lu.solve(&rhs);
    let condition = lu.condition_1();
    Ok(ResolventSolution {
        x,
        condition,
        ill_conditioned: !(condition <= ill_conditioning_threshold::<S>()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_examples() {
        let a = Matrix::<f64>::from_f64_rows(&[&[-1.0]]).unwrap();
        let r0 = resolvent_apply(&a, &[1.0], 0.0).unwrap();
        assert!((r0.x[0] - Complex::new(1.0, 0.0)).norm() < 1e-15);
        let r1 = resolvent_apply(&a, &[1.0], 1.0).unwrap();
        assert!((r1.x[0] - Complex::new(0.5, -0.5)).norm() < 1e-15);
        assert!(!r1.ill_conditioned);
    }

    #[test]
    fn diagonal_dc() {
        let a = Matrix::<f64>::from_diagonal(&[-1.0, -2.0]);
        let r = resolvent_apply(&a, &[1.0, 1.0], 0.0).unwrap();
        assert!((r.x[0].re - 1.0).abs() < 1e-15 && (r.x[1].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pole_on_axis_is_flagged() {
        let a = Matrix::<f64>::from_f64_rows(&[&[0.0, 1.0], &[-1.0, -1e-17]]).unwrap();
        match resolvent_apply(&a, &[0.0, 1.0], 1.0) {
            Ok(sol) => assert!(sol.ill_conditioned),
            Err(Error::Numerical(_)) => {}
            Err(e) => panic!("unexpected {e}"),
        }
    }
}
