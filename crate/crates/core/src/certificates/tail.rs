//! Sign of `h(t) = p e^{Mt} q` as `t → ∞`.
//!
//! Eigenvalues of `M` are grouped (near-coincident ones together, so that
//! defective blocks split by roundoff stay one group), and each group's
//! contribution `e^{zt} Σ_j c_j t^j` is extracted with a spectral projector
//! obtained from a contour integral of the resolvent. The slowest-decaying
//! group with a nonzero contribution decides: real groups give the sign of
//! their highest nonzero `c_j`, complex ones make the tail oscillate.

use num_complex::Complex;

use crate::error::Result;
use crate::linalg::lu::Lu;
use crate::linalg::matrix::norm2;
use crate::linalg::{eigenvalues, Matrix};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailSign {
    Positive,
    Negative,
    /// No group contributes: `h ≡ 0`.
    Zero,
    Oscillatory,
}

impl TailSign {
    pub fn as_str(self) -> &'static str {
        match self {
            TailSign::Positive => "positive",
            TailSign::Negative => "negative",
            TailSign::Zero => "zero",
            TailSign::Oscillatory => "oscillatory",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailAnalysis<S> {
    pub sign: TailSign,
    /// Decay rate `Re z` of the deciding group.
    pub rate: Option<S>,
    /// Power of `t` multiplying the leading exponential.
    pub power: usize,
    /// Leading coefficient (real groups only).
    pub coefficient: Option<S>,
}

impl<S: Real> TailAnalysis<S> {
    pub fn describe(&self) -> String {
        match (self.sign, self.rate) {
            (TailSign::Zero, _) | (_, None) => "tail: identically zero".to_string(),
            (TailSign::Oscillatory, Some(r)) => {
                format!("tail: oscillatory mode with decay rate {:.6e}", r.as_f64())
            }
            (sign, Some(r)) => format!(
                "tail: {} (leading term t^{} e^({:.6e} t), coefficient {:.6e})",
                sign.as_str(),
                self.power,
                r.as_f64(),
                self.coefficient.map_or(f64::NAN, |c| c.as_f64())
            ),
        }
    }
}

const CONTOUR_POINTS: usize = 128;

/// Asymptotic sign of `p e^{Mt} q`.
pub fn tail_sign<S: Real>(m: &Matrix<S>, p: &[S], q: &[S]) -> Result<TailAnalysis<S>> {
    let zero = TailAnalysis {
        sign: TailSign::Zero,
        rate: None,
        power: 0,
        coefficient: None,
    };
    let n = m.rows();
    if n == 0 || norm2(p) == S::zero() || norm2(q) == S::zero() {
        return Ok(zero);
    }
    let eigs = eigenvalues(m)?;
    let scale = eigs.iter().fold(S::one(), |s, z| s.max(z.norm())).max(m.norm_1());
    let groups = group_eigenvalues(&eigs, scale);

    let base = norm2(p) * norm2(q);
    let significance = S::lit(1e-9).max(S::lit(1e5) * S::epsilon());
    let band = S::lit(1e-6) * scale;

    let mut contributions: Vec<(Complex<S>, bool, Vec<Complex<S>>)> = Vec::new();
    for (gi, group) in groups.iter().enumerate() {
        let center = group.iter().fold(Complex::new(S::zero(), S::zero()), |a, &z| a + z)
            / S::from_usize_lossy(group.len());
        let inner = group.iter().fold(S::zero(), |r, z| r.max((z - center).norm()));
        let outer = groups
            .iter()
            .enumerate()
            .filter(|&(gj, _)| gj != gi)
            .flat_map(|(_, g)| g.iter())
            .fold(S::infinity(), |r, z| r.min((z - center).norm()));
        let radius = if outer.is_finite() {
            S::lit(0.5) * (inner + outer)
        } else {
            inner + S::lit(0.5) * scale
        };
        let y = project(m, q, center, radius)?;
        let real = center.im.abs() <= group_threshold::<S>(2) * scale;
        let mut coeffs = Vec::with_capacity(group.len());
        let mut v = y;
        let mut factorial = S::one();
        for j in 0..group.len() {
            if j > 0 {
                factorial *= S::from_usize_lossy(j);
                v = shifted_apply(m, &v, center);
            }
            let cj = p
                .iter()
                .zip(&v)
                .fold(Complex::new(S::zero(), S::zero()), |a, (&pi, &vi)| a + vi * pi)
                / factorial;
            let noise = significance * base * (scale + center.norm()).powi(j as i32) / factorial;
            coeffs.push(if cj.norm() <= noise { Complex::new(S::zero(), S::zero()) } else { cj });
        }
        if coeffs.iter().any(|c| c.norm() > S::zero()) {
            contributions.push((center, real, coeffs));
        }
    }
    contributions.sort_by(|a, b| b.0.re.partial_cmp(&a.0.re).expect("finite eigenvalues"));
    let Some(lead_rate) = contributions.first().map(|c| c.0.re) else {
        return Ok(zero);
    };
    let leading: Vec<_> = contributions
        .iter()
        .filter(|c| (c.0.re - lead_rate).abs() <= band)
        .collect();
    if leading.len() > 1 || leading.iter().any(|c| !c.1) {
        return Ok(TailAnalysis {
            sign: TailSign::Oscillatory,
            rate: Some(lead_rate),
            power: 0,
            coefficient: None,
        });
    }
    let coeffs = &leading[0].2;
    let (power, c) = coeffs
        .iter()
        .enumerate()
        .rev()
        .find(|(_, c)| c.norm() > S::zero())
        .map(|(j, c)| (j, c.re))
        .expect("group with a nonzero coefficient");
    Ok(TailAnalysis {
        sign: if c > S::zero() {
            TailSign::Positive
        } else {
            TailSign::Negative
        },
        rate: Some(lead_rate),
        power,
        coefficient: Some(c),
    })
}

/// Merge distance for a group of `k` eigenvalues, relative to the spectral
/// scale: a `k`-fold defective eigenvalue splits by about `eps^{1/k}`.
fn group_threshold<S: Real>(k: usize) -> S {
    S::lit(10.0) * (S::lit(10.0) * S::epsilon()).powf(S::one() / S::from_usize_lossy(k.max(2)))
}

fn group_eigenvalues<S: Real>(eigs: &[Complex<S>], scale: S) -> Vec<Vec<Complex<S>>> {
    split_group(eigs.to_vec(), scale)
}

/// Connected components at the merge distance for the current group size,
/// refined recursively until stable.
fn split_group<S: Real>(group: Vec<Complex<S>>, scale: S) -> Vec<Vec<Complex<S>>> {
    if group.len() <= 1 {
        return vec![group];
    }
    let thr = group_threshold::<S>(group.len()).min(S::lit(0.1)) * scale;
    let n = group.len();
    let mut label: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            if (group[i] - group[j]).norm() <= thr {
                let (li, lj) = (label[i], label[j]);
                if li != lj {
                    label.iter_mut().filter(|l| **l == lj).for_each(|l| *l = li);
                }
            }
        }
    }
    let mut ids: Vec<usize> = label.clone();
    ids.sort_unstable();
    ids.dedup();
    if ids.len() == 1 {
        return vec![group];
    }
    ids.into_iter()
        .flat_map(|id| {
            let sub: Vec<Complex<S>> = (0..n).filter(|&k| label[k] == id).map(|k| group[k]).collect();
            split_group(sub, scale)
        })
        .collect()
}

/// `Π q` with `Π = (2πi)⁻¹ ∮ (sI - M)⁻¹ ds` on the circle `|s - z| = r`.
fn project<S: Real>(m: &Matrix<S>, q: &[S], z: Complex<S>, r: S) -> Result<Vec<Complex<S>>> {
    let n = m.rows();
    let rhs: Vec<Complex<S>> = q.iter().map(|&x| Complex::new(x, S::zero())).collect();
    let mut acc = vec![Complex::new(S::zero(), S::zero()); n];
    let k = S::from_usize_lossy(CONTOUR_POINTS);
    for idx in 0..CONTOUR_POINTS {
        let theta = S::TAU() * (S::from_usize_lossy(idx) + S::lit(0.5)) / k;
        let dir = Complex::new(theta.cos(), theta.sin());
        let s = z + dir * r;
        let mut mat = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let diag = if i == j { s } else { Complex::new(S::zero(), S::zero()) };
                mat.push(diag - Complex::new(m[(i, j)], S::zero()));
            }
        }
        let x = Lu::<S, Complex<S>>::factor(n, mat)?.solve(&rhs);
        let w = dir * r / k;
        for (a, xi) in acc.iter_mut().zip(x) {
            *a += xi * w;
        }
    }
    Ok(acc)
}

/// `(M - zI) v`
fn shifted_apply<S: Real>(m: &Matrix<S>, v: &[Complex<S>], z: Complex<S>) -> Vec<Complex<S>> {
    let n = m.rows();
    (0..n)
        .map(|i| {
            let mut acc = -(z * v[i]);
            for j in 0..n {
                acc += v[j] * m[(i, j)];
            }
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix<f64> {
        Matrix::from_f64_rows(rows).unwrap()
    }

    #[test]
    fn simple_real_modes() {
        // h = e^{-t} - e^{-2t}: positive tail from the slow mode
        let a = m(&[&[-1.0, 0.0], &[0.0, -2.0]]);
        let t = tail_sign(&a, &[1.0, -1.0], &[1.0, 1.0]).unwrap();
        assert_eq!(t.sign, TailSign::Positive);
        assert!((t.rate.unwrap() + 1.0).abs() < 1e-12);
        assert!((t.coefficient.unwrap() - 1.0).abs() < 1e-9);
        // slow mode invisible: decided by the fast one
        let t = tail_sign(&a, &[0.0, -1.0], &[1.0, 1.0]).unwrap();
        assert_eq!(t.sign, TailSign::Negative);
        assert!((t.rate.unwrap() + 2.0).abs() < 1e-12);
    }

    #[test]
    fn jordan_block_uses_highest_power() {
        // (t - 1) e^{-t}
        let a = m(&[&[-1.0, 1.0], &[0.0, -1.0]]);
        let t = tail_sign(&a, &[1.0, -1.0], &[0.0, 1.0]).unwrap();
        assert_eq!(t.sign, TailSign::Positive);
        assert_eq!(t.power, 1);
        // -(t + 1) e^{-t} from a companion-form double pole
        let c = m(&[&[0.0, 1.0], &[-1.0, -2.0]]);
        let t = tail_sign(&c, &[-1.0, 0.0], &[1.0, 0.0]).unwrap();
        assert_eq!(t.sign, TailSign::Negative);
        assert_eq!(t.power, 1);
    }

    #[test]
    fn oscillation_and_zero() {
        let a = m(&[&[0.0, 1.0], &[-1.0, -0.2]]);
        assert_eq!(tail_sign(&a, &[1.0, 0.0], &[0.0, 1.0]).unwrap().sign, TailSign::Oscillatory);
        assert_eq!(tail_sign(&a, &[0.0, 0.0], &[0.0, 1.0]).unwrap().sign, TailSign::Zero);
        assert_eq!(
            tail_sign(&Matrix::<f64>::zeros(0, 0), &[], &[]).unwrap().sign,
            TailSign::Zero
        );
    }

    #[test]
    fn triple_pole() {
        // companion form of (s+1)^3; the impulse response t² e^{-t} / 2 is positive
        let a = m(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[-1.0, -3.0, -3.0]]);
        let t = tail_sign(&a, &[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(t.sign, TailSign::Positive);
        assert_eq!(t.power, 2);
        assert!((t.coefficient.unwrap() - 0.5).abs() < 1e-6);
    }
}
