//! Eigenvalues of a real square matrix: Householder reduction to Hessenberg
//! form followed by the Francis double-shift QR iteration.

use num_complex::Complex;

use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

/// All eigenvalues of `a`, sorted by decreasing real part (ties broken by
/// imaginary part, descending).
pub fn eigenvalues<S: Real>(a: &Matrix<S>) -> Result<Vec<Complex<S>>> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "eigenvalues of non-square {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    if !a.is_finite() {
        return Err(Error::InvalidArgument("non-finite matrix entry".into()));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h: Vec<Vec<S>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    hessenberg(&mut h);
    let mut eigs = hqr(&mut h)?;
    eigs.sort_by(|x, y| {
        y.re.partial_cmp(&x.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(y.im.partial_cmp(&x.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    Ok(eigs)
}

/// max Re λ(A)
pub fn spectral_abscissa<S: Real>(a: &Matrix<S>) -> Result<S> {
    let eigs = eigenvalues(a)?;
    Ok(eigs.iter().map(|z| z.re).fold(S::neg_infinity(), S::max))
}

fn hessenberg<S: Real>(h: &mut [Vec<S>]) {
    let n = h.len();
    if n < 3 {
        return;
    }
    let high = n - 1;
    let mut ort = vec![S::zero(); n];
    for m in 1..high {
        let scale: S = (m..=high).map(|i| h[i][m - 1].abs()).sum();
        if scale == S::zero() {
            continue;
        }
        let mut hh = S::zero();
        for i in (m..=high).rev() {
            ort[i] = h[i][m - 1] / scale;
            hh += ort[i] * ort[i];
        }
        let mut g = hh.sqrt();
        if ort[m] > S::zero() {
            g = -g;
        }
        hh -= ort[m] * g;
        ort[m] -= g;
        for j in m..n {
            let mut f = S::zero();
            for i in (m..=high).rev() {
                f += ort[i] * h[i][j];
            }
            f /= hh;
            for i in m..=high {
                h[i][j] -= f * ort[i];
            }
        }
        for row in h.iter_mut() {
            let mut f = S::zero();
            for j in (m..=high).rev() {
                f += ort[j] * row[j];
            }
            f /= hh;
            for j in m..=high {
                row[j] -= f * ort[j];
            }
        }
        ort[m] = scale * ort[m];
        h[m][m - 1] = scale * g;
    }
}

#[allow(clippy::many_single_char_names, unused_assignments)]
fn hqr<S: Real>(h: &mut [Vec<S>]) -> Result<Vec<Complex<S>>> {
    let nn = h.len();
    let low = 0usize;
    let eps = S::epsilon();
    let two = S::lit(2.0);
    let mut wr = vec![S::zero(); nn];
    let mut wi = vec![S::zero(); nn];
    let mut exshift = S::zero();
    let (mut p, mut q, mut r, mut s, mut z) = (S::zero(), S::zero(), S::zero(), S::zero(), S::zero());
    let (mut x, mut y, mut w);

    let mut norm = S::zero();
    for i in 0..nn {
        for j in i.saturating_sub(1)..nn {
            norm += h[i][j].abs();
        }
    }

    // `n` is a signed cursor over the active block.
    let mut n: isize = nn as isize - 1;
    let mut iter = 0usize;
    while n >= low as isize {
        let nu = n as usize;
        let mut l = nu;
        while l > low {
            s = h[l - 1][l - 1].abs() + h[l][l].abs();
            if s == S::zero() {
                s = norm;
            }
            if h[l][l - 1].abs() < eps * s {
                break;
            }
            l -= 1;
        }

        if l == nu {
            wr[nu] = h[nu][nu] + exshift;
            wi[nu] = S::zero();
            n -= 1;
            iter = 0;
        } else if l + 1 == nu {
            w = h[nu][nu - 1] * h[nu - 1][nu];
            p = (h[nu - 1][nu - 1] - h[nu][nu]) / two;
            q = p * p + w;
            z = q.abs().sqrt();
            x = h[nu][nu] + exshift;
            if q >= S::zero() {
                z = if p >= S::zero() { p + z } else { p - z };
                wr[nu - 1] = x + z;
                wr[nu] = wr[nu - 1];
                if z != S::zero() {
                    wr[nu] = x - w / z;
                }
                wi[nu - 1] = S::zero();
                wi[nu] = S::zero();
            } else {
                wr[nu - 1] = x + p;
                wr[nu] = x + p;
                wi[nu - 1] = z;
                wi[nu] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            x = h[nu][nu];
            y = S::zero();
            w = S::zero();
            if l < nu {
                y = h[nu - 1][nu - 1];
                w = h[nu][nu - 1] * h[nu - 1][nu];
            }
            if iter == 10 {
                exshift += x;
                for i in low..=nu {
                    h[i][i] -= x;
                }
                s = h[nu][nu - 1].abs() + h[nu - 1][nu - 2].abs();
                x = S::lit(0.75) * s;
                y = x;
                w = S::lit(-0.4375) * s * s;
            }
            if iter == 30 {
                s = (y - x) / two;
                s = s * s + w;
                if s > S::zero() {
                    s = s.sqrt();
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / two + s);
                    for i in low..=nu {
                        h[i][i] -= s;
                    }
                    exshift += s;
                    x = S::lit(0.964);
                    y = x;
                    w = x;
                }
            }
            iter += 1;
            if iter > MAX_SWEEPS_PER_EIGENVALUE {
                return Err(Error::Numerical(
                    "QR iteration did not converge while computing eigenvalues".into(),
                ));
            }

            let mut m = nu - 2;
            loop {
                z = h[m][m];
                r = x - z;
                s = y - z;
                p = (r * s - w) / h[m + 1][m] + h[m][m + 1];
                q = h[m + 1][m + 1] - z - r - s;
                r = h[m + 2][m + 1];
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                if h[m][m - 1].abs() * (q.abs() + r.abs())
                    < eps * (p.abs() * (h[m - 1][m - 1].abs() + z.abs() + h[m + 1][m + 1].abs()))
                {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=nu {
                h[i][i - 2] = S::zero();
                if i > m + 2 {
                    h[i][i - 3] = S::zero();
                }
            }

            let mut k = m;
            while k < nu {
                let notlast = k != nu - 1;
                if k != m {
                    p = h[k][k - 1];
                    q = h[k + 1][k - 1];
                    r = if notlast { h[k + 2][k - 1] } else { S::zero() };
                    x = p.abs() + q.abs() + r.abs();
                    if x == S::zero() {
                        k += 1;
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = (p * p + q * q + r * r).sqrt();
                if p < S::zero() {
                    s = -s;
                }
                if s != S::zero() {
                    if k != m {
                        h[k][k - 1] = -s * x;
                    } else if l != m {
                        h[k][k - 1] = -h[k][k - 1];
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..nn {
                        p = h[k][j] + q * h[k + 1][j];
                        if notlast {
                            p += r * h[k + 2][j];
                            h[k + 2][j] -= p * z;
                        }
                        h[k][j] -= p * x;
                        h[k + 1][j] -= p * y;
                    }
                    let imax = nu.min(k + 3);
                    for row in h.iter_mut().take(imax + 1) {
                        p = x * row[k] + y * row[k + 1];
                        if notlast {
                            p += z * row[k + 2];
                            row[k + 2] -= p * r;
                        }
                        row[k] -= p;
                        row[k + 1] -= p * q;
                    }
                }
                k += 1;
            }
        }
    }
    Ok(wr.into_iter().zip(wi).map(|(re, im)| Complex::new(re, im)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix<f64> {
        Matrix::from_f64_rows(rows).unwrap()
    }

    #[test]
    fn scalar_and_diagonal() {
        assert_eq!(spectral_abscissa(&m(&[&[-1.0]])).unwrap(), -1.0);
        assert_eq!(spectral_abscissa(&m(&[&[-1.0, 0.0], &[0.0, -2.0]])).unwrap(), -1.0);
    }

    #[test]
    fn lightly_damped_oscillator() {
        // λ² + 0.2λ + 1 = 0  ->  λ = -0.1 ± i·sqrt(0.99)
        let a = m(&[&[0.0, 1.0], &[-1.0, -0.2]]);
        let eigs = eigenvalues(&a).unwrap();
        assert!((spectral_abscissa(&a).unwrap() + 0.1).abs() < 1e-14);
        assert!((eigs[0].im - 0.99f64.sqrt()).abs() < 1e-14);
        assert!((eigs[1].im + 0.99f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn companion_with_known_roots() {
        // (s+1)(s+2)(s+3)(s+4) = s^4 + 10 s^3 + 35 s^2 + 50 s + 24
        let a = m(&[
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
            &[-24.0, -50.0, -35.0, -10.0],
        ]);
        let eigs = eigenvalues(&a).unwrap();
        for (z, expect) in eigs.iter().zip([-1.0, -2.0, -3.0, -4.0]) {
            assert!((z.re - expect).abs() < 1e-9, "{z} vs {expect}");
            assert!(z.im.abs() < 1e-9);
        }
    }

    #[test]
    fn trace_and_determinant_are_preserved() {
        let a = m(&[
            &[1.0, 2.0, -1.0, 0.5, 3.0],
            &[0.3, -2.0, 4.0, 1.0, -1.0],
            &[2.0, 1.0, 0.0, -3.0, 0.2],
            &[-1.0, 0.0, 2.0, 1.0, 1.0],
            &[0.5, -0.7, 1.1, 2.2, -0.4],
        ]);
        let eigs = eigenvalues(&a).unwrap();
        let tr: f64 = (0..5).map(|i| a[(i, i)]).sum();
        let sum: Complex<f64> = eigs.iter().sum();
        assert!((sum.re - tr).abs() < 1e-10 && sum.im.abs() < 1e-10);
        let prod: Complex<f64> = eigs.iter().product();
        let d = determinant(&a);
        assert!((prod.re - d).abs() < 1e-8 * d.abs().max(1.0));
    }

    fn determinant(a: &Matrix<f64>) -> f64 {
        let n = a.rows();
        let mut m: Vec<Vec<f64>> = (0..n).map(|i| a.row(i).to_vec()).collect();
        let mut det = 1.0;
        for k in 0..n {
            let p = (k..n).max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs())).unwrap();
            if p != k {
                m.swap(p, k);
                det = -det;
            }
            det *= m[k][k];
            for i in k + 1..n {
                let f = m[i][k] / m[k][k];
                for j in k..n {
                    m[i][j] -= f * m[k][j];
                }
            }
        }
        det
    }

    #[test]
    fn non_square_is_rejected() {
        let a = Matrix::<f64>::zeros(2, 3);
        assert!(matches!(eigenvalues(&a), Err(Error::Dimension(_))));
    }
}
