use num_complex::Complex;

use super::eigen::eigenvalues;
use super::expm::expm;
use super::matrix::{dot, Matrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Stable single-input single-output system `ẋ = Ax + bu`, `y = cx`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace<S> {
    a: Matrix<S>,
    b: Vec<S>,
    c: Vec<S>,
    eigenvalues: Vec<Complex<S>>,
}

impl<S: Real> StateSpace<S> {
    /// Validates shapes, finiteness and the Hurwitz property of `a`.
    pub fn new(a: Matrix<S>, b: Vec<S>, c: Vec<S>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension(format!(
                "A must be square, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let n = a.rows();
        if n == 0 {
            return Err(Error::Dimension("state dimension must be at least 1".into()));
        }
        if b.len() != n || c.len() != n {
            return Err(Error::Dimension(format!(
                "b and c must have length {n}, got {} and {}",
                b.len(),
                c.len()
            )));
        }
        if !a.is_finite() || b.iter().chain(&c).any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("non-finite entry in (A, b, c)".into()));
        }
        if b.iter().all(|x| x.is_zero()) && c.iter().all(|x| x.is_zero()) {
            return Err(Error::Degenerate("b and c are both zero".into()));
        }
        let eigenvalues = eigenvalues(&a)?;
        let abscissa = eigenvalues[0].re;
        if abscissa >= S::zero() {
            return Err(Error::NotHurwitz {
                abscissa: abscissa.as_f64(),
                offending: eigenvalues
                    .iter()
                    .filter(|z| z.re >= S::zero())
                    .map(|z| (z.re.as_f64(), z.im.as_f64()))
                    .collect(),
            });
        }
        Ok(Self { a, b, c, eigenvalues })
    }

    /// Convenience constructor from `f64` data.
    pub fn from_f64(a: &[&[f64]], b: &[f64], c: &[f64]) -> Result<Self> {
        Self::new(
            Matrix::from_f64_rows(a)?,
            b.iter().map(|&x| S::lit(x)).collect(),
            c.iter().map(|&x| S::lit(x)).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn a(&self) -> &Matrix<S> {
        &self.a
    }

    pub fn b(&self) -> &[S] {
        &self.b
    }

    pub fn c(&self) -> &[S] {
        &self.c
    }

    /// Eigenvalues of `A`, sorted by decreasing real part.
    pub fn eigenvalues(&self) -> &[Complex<S>] {
        &self.eigenvalues
    }

    /// max Re λ(A), strictly negative.
    pub fn abscissa(&self) -> S {
        self.eigenvalues[0].re
    }

    /// Same system with `c` multiplied by `k`.
    pub fn with_scaled_output(&self, k: S) -> Result<Self> {
        Self::new(self.a.clone(), self.b.clone(), self.c.iter().map(|&x| x * k).collect())
    }

    /// Impulse response `g(t) = c e^{At} b` for `t ≥ 0`.
    pub fn impulse(&self, t: S) -> Result<S> {
        let e = expm(&self.a, t)?;
        Ok(dot(&self.c, &e.mul_vec(&self.b)))
    }
}

/// Exponential decay envelope `||e^{At}||_F ≤ M e^{-σ t}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralInfo<S> {
    /// Spectral abscissa α(A), in 1/s.
    pub abscissa: S,
    pub decay_m: S,
    pub decay_sigma: S,
}

impl<S: Real> SpectralInfo<S> {
    /// `σ = -α/2`; `M` is 1.25 times the largest sampled value of
    /// `||e^{At}||_F e^{σt}` over `t = 0` and a log grid on `[1e-3/σ, 100/σ]`.
    pub fn of(sys: &StateSpace<S>) -> Result<Self> {
        let abscissa = sys.abscissa();
        let sigma = -abscissa / S::lit(2.0);
        let mut peak = S::from_usize_lossy(sys.dim()).sqrt();
        for t in log_grid(S::lit(1e-3) / sigma, S::lit(100.0) / sigma, 200) {
            // log domain: e^{σt} alone overflows f32 near the end of the grid
            let v = (expm(sys.a(), t)?.norm_fro().ln() + sigma * t).exp();
            if !v.is_finite() {
                return Err(Error::Numerical(format!("decay envelope overflow at t = {t}")));
            }
            peak = peak.max(v);
        }
        Ok(Self {
            abscissa,
            decay_m: S::lit(1.25) * peak,
            decay_sigma: sigma,
        })
    }

    /// `M e^{-σ t}`
    pub fn envelope(&self, t: S) -> S {
        self.decay_m * (-self.decay_sigma * t).exp()
    }
}

/// `points` logarithmically spaced values from `lo` to `hi` inclusive.
pub fn log_grid<S: Real>(lo: S, hi: S, points: usize) -> Vec<S> {
    if points == 1 {
        return vec![lo];
    }
    let (llo, lhi) = (lo.log10(), hi.log10());
    let last = S::from_usize_lossy(points - 1);
    (0..points)
        .map(|i| {
            let e = llo + (lhi - llo) * S::from_usize_lossy(i) / last;
            S::lit(10.0).powf(e)
        })
        .collect()
}
