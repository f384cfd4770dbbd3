//! Impulse-response autocorrelation `R(t) = ∫ g(τ) g(τ+t) dτ` of a stable
//! system, its first three derivatives and its periodic summation.
//!
//! For `t ≥ 0` the closed form is `R(t) = c e^{At} P cᵀ` with `P` the
//! controllability Gramian; `R` is even, so odd derivatives flip sign for
//! `t < 0`. At `t = 0` every derivative is the right limit `c Aᵐ P cᵀ`.

use crate::error::{Error, Result};
use crate::linalg::matrix::{dot, norm2};
use crate::linalg::{expm, solve_lyapunov_with, Matrix, SpectralInfo, StateSpace};
use crate::linalg::lu::Lu;
use crate::scalar::{Real, Tolerances};

/// Highest derivative order available.
pub const MAX_ORDER: usize = 3;

/// Re-anchoring interval for grid propagation with a fixed step exponential.
const REANCHOR_EVERY: usize = 64;

#[derive(Debug, Clone)]
pub struct AutocorrelationModel<S> {
    sys: StateSpace<S>,
    gramian: Matrix<S>,
    r0: S,
    spectral: SpectralInfo<S>,
    /// `P cᵀ`
    pc: Vec<S>,
    /// `c Aᵐ` for `m = 0..=3`
    c_pows: [Vec<S>; 4],
    tol: Tolerances<S>,
}

impl<S: Real> AutocorrelationModel<S> {
    pub fn build(sys: &StateSpace<S>) -> Result<Self> {
        Self::build_with(sys, Tolerances::default())
    }

    pub fn build_with(sys: &StateSpace<S>, tol: Tolerances<S>) -> Result<Self> {
        let gramian = solve_lyapunov_with(sys.a(), sys.b(), &tol)?;
        let pc = gramian.mul_vec(sys.c());
        let r0 = dot(sys.c(), &pc);
        if !(r0 > tol.eval_eps) {
            return Err(Error::Degenerate(format!(
                "R(0) = c P cᵀ = {r0} is not above {}: output is orthogonal to the reachable space",
                tol.eval_eps
            )));
        }
        let spectral = SpectralInfo::of(sys)?;
        let c0 = sys.c().to_vec();
        let c1 = sys.a().vec_mul(&c0);
        let c2 = sys.a().vec_mul(&c1);
        let c3 = sys.a().vec_mul(&c2);
        Ok(Self {
            sys: sys.clone(),
            gramian,
            r0,
            spectral,
            pc,
            c_pows: [c0, c1, c2, c3],
            tol,
        })
    }

    pub fn system(&self) -> &StateSpace<S> {
        &self.sys
    }

    pub fn gramian(&self) -> &Matrix<S> {
        &self.gramian
    }

    /// `R(0) = c P cᵀ = ||g||²`
    pub fn r0(&self) -> S {
        self.r0
    }

    pub fn spectral(&self) -> &SpectralInfo<S> {
        &self.spectral
    }

    pub fn tolerances(&self) -> &Tolerances<S> {
        &self.tol
    }

    /// `P cᵀ`
    pub fn gramian_c(&self) -> &[S] {
        &self.pc
    }

    /// Row vector `c Aᵐ`.
    pub fn c_power(&self, m: usize) -> &[S] {
        &self.c_pows[m]
    }

    /// `R^{(m)}(t)`.
    pub fn deriv(&self, m: usize, t: S) -> Result<S> {
        check_order(m)?;
        Ok(self.derivs(t)?[m])
    }

    /// `[R, Ṙ, R̈, R⃛](t)` from a single matrix exponential.
    pub fn derivs(&self, t: S) -> Result<[S; 4]> {
        let x = expm(self.sys.a(), t.abs())?.mul_vec(&self.pc);
        Ok(self.apply_sign(self.derivs_from_state(&x), t))
    }

    /// Derivatives at `t = i h` for `i = 0..count`, with the state propagated
    /// by a fixed-step exponential and re-anchored periodically.
    pub fn derivs_on_uniform_grid(&self, h: S, count: usize) -> Result<Vec<[S; 4]>> {
        Ok(self
            .states_on_uniform_grid(h, count)?
            .iter()
            .map(|x| self.derivs_from_state(x))
            .collect())
    }

    /// `x(t) = e^{At} P cᵀ` at `t = i h` for `i = 0..count`.
    pub fn states_on_uniform_grid(&self, h: S, count: usize) -> Result<Vec<Vec<S>>> {
        if !(h > S::zero()) {
            return Err(Error::InvalidArgument(format!("grid step must be positive, got {h}")));
        }
        let step = expm(self.sys.a(), h)?;
        let mut out: Vec<Vec<S>> = Vec::with_capacity(count);
        for i in 0..count {
            let x = if i == 0 {
                self.pc.clone()
            } else if i % REANCHOR_EVERY == 0 {
                expm(self.sys.a(), h * S::from_usize_lossy(i))?.mul_vec(&self.pc)
            } else {
                step.mul_vec(&out[i - 1])
            };
            out.push(x);
        }
        Ok(out)
    }

    /// `[c x, cA x, cA² x, cA³ x]`
    pub fn derivs_from_state(&self, x: &[S]) -> [S; 4] {
        [
            dot(&self.c_pows[0], x),
            dot(&self.c_pows[1], x),
            dot(&self.c_pows[2], x),
            dot(&self.c_pows[3], x),
        ]
    }

    fn apply_sign(&self, mut d: [S; 4], t: S) -> [S; 4] {
        if t < S::zero() {
            d[1] = -d[1];
            d[3] = -d[3];
        }
        d
    }
}

fn check_order(m: usize) -> Result<()> {
    if m > MAX_ORDER {
        Err(Error::InvalidArgument(format!(
            "derivative order {m} outside 0..={MAX_ORDER}"
        )))
    } else {
        Ok(())
    }
}

/// Simpson estimate of `R(t)` with its tail bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureEstimate<S> {
    pub value: S,
    /// Upper bound on the neglected `∫_horizon^∞` part.
    pub tail_bound: S,
    /// Simpson intervals actually used (always even).
    pub steps: usize,
}

/// Tail tolerance the quadrature oracle insists on before integrating.
pub fn quadrature_tail_tol<S: Real>() -> S {
    S::lit(1e-9).max(S::lit(1e5) * S::epsilon())
}

/// `(M ||b|| ||c||)² e^{-σt} e^{-2σH} / (2σ)`
pub fn quadrature_tail_bound<S: Real>(spectral: &SpectralInfo<S>, sys: &StateSpace<S>, t: S, horizon: S) -> S {
    let k = spectral.decay_m * norm2(sys.b()) * norm2(sys.c());
    let sigma = spectral.decay_sigma;
    k * k * (-sigma * t).exp() * (-S::lit(2.0) * sigma * horizon).exp() / (S::lit(2.0) * sigma)
}

/// Smallest horizon whose tail bound is below `tol`.
pub fn required_horizon<S: Real>(spectral: &SpectralInfo<S>, sys: &StateSpace<S>, t: S, tol: S) -> S {
    let at_zero = quadrature_tail_bound(spectral, sys, t, S::zero());
    if at_zero <= tol {
        return S::zero();
    }
    (at_zero / tol).ln() / (S::lit(2.0) * spectral.decay_sigma)
}

/// Independent estimate of `R(t) = ∫₀^∞ g(τ) g(τ+t) dτ` by composite Simpson
/// on `[0, horizon]`, with `g(τ) = c e^{Aτ} b` evaluated directly.
///
/// Refuses with [`Error::InsufficientHorizon`] when the tail beyond `horizon`
/// could exceed [`quadrature_tail_tol`].
pub fn autocorr_quadrature_oracle<S: Real>(
    sys: &StateSpace<S>,
    t: S,
    horizon: S,
    steps: usize,
) -> Result<QuadratureEstimate<S>> {
    if !(t >= S::zero()) {
        return Err(Error::InvalidArgument(format!("lag must be non-negative, got {t}")));
    }
    if !(horizon > S::zero()) || steps < 2 {
        return Err(Error::InvalidArgument(format!(
            "need positive horizon and at least 2 steps, got {horizon} and {steps}"
        )));
    }
    let spectral = SpectralInfo::of(sys)?;
    let tol = quadrature_tail_tol::<S>();
    let tail = quadrature_tail_bound(&spectral, sys, t, horizon);
    if !(tail <= tol) {
        return Err(Error::InsufficientHorizon {
            horizon: horizon.as_f64(),
            required: required_horizon(&spectral, sys, t, tol).as_f64(),
            tail: tail.as_f64(),
        });
    }
    let steps = steps + steps % 2;
    let h = horizon / S::from_usize_lossy(steps);
    // g(τ_j) and g(τ_j + t) by stepping x ← e^{Ah} x, re-anchored periodically
    let a = sys.a();
    let step = expm(a, h)?;
    let b = sys.b().to_vec();
    let bt = expm(a, t)?.mul_vec(&b);
    let (mut x, mut y) = (b.clone(), bt.clone());
    let mut acc = S::zero();
    for j in 0..=steps {
        if j > 0 {
            if j % REANCHOR_EVERY == 0 {
                let e = expm(a, h * S::from_usize_lossy(j))?;
                x = e.mul_vec(&b);
                y = e.mul_vec(&bt);
            } else {
                x = step.mul_vec(&x);
                y = step.mul_vec(&y);
            }
        }
        let w = if j == 0 || j == steps {
            S::one()
        } else if j % 2 == 1 {
            S::lit(4.0)
        } else {
            S::lit(2.0)
        };
        acc += w * dot(sys.c(), &x) * dot(sys.c(), &y);
    }
    Ok(QuadratureEstimate {
        value: acc * h / S::lit(3.0),
        tail_bound: tail,
        steps,
    })
}

/// Periodic summation `R^T(t) = Σ_k R(t + kT)`, evaluated in closed form via
/// `Q = (I - e^{AT})⁻¹ P`.
#[derive(Debug, Clone)]
pub struct PeriodizedModel<S> {
    base: AutocorrelationModel<S>,
    period: S,
    q: Matrix<S>,
    exp_at: Matrix<S>,
    /// `Q cᵀ`
    qc: Vec<S>,
    condition: S,
    ill_conditioned: bool,
}

impl<S: Real> PeriodizedModel<S> {
    pub fn build(model: &AutocorrelationModel<S>, period: S) -> Result<Self> {
        if !(period > S::zero()) || !period.is_finite() {
            return Err(Error::InvalidArgument(format!("period must be positive, got {period}")));
        }
        let a = model.sys.a();
        let n = a.rows();
        let exp_at = expm(a, period)?;
        let lhs = &Matrix::identity(n) - &exp_at;
        let lu = Lu::from_matrix(&lhs)
            .map_err(|_| Error::Numerical(format!("I - e^(AT) is singular at T = {period}")))?;
        let condition = lu.condition_1();
        let q = lu.solve_matrix(&model.gramian);
        let qc = q.mul_vec(model.sys.c());
        Ok(Self {
            base: model.clone(),
            period,
            q,
            exp_at,
            qc,
            condition,
            ill_conditioned: !(condition <= crate::linalg::resolvent::ill_conditioning_threshold::<S>()),
        })
    }

    pub fn base(&self) -> &AutocorrelationModel<S> {
        &self.base
    }

    pub fn period(&self) -> S {
        self.period
    }

    /// `(I - e^{AT})⁻¹ P`
    pub fn q(&self) -> &Matrix<S> {
        &self.q
    }

    pub fn exp_at(&self) -> &Matrix<S> {
        &self.exp_at
    }

    /// 1-norm condition number of `I - e^{AT}`.
    pub fn condition(&self) -> S {
        self.condition
    }

    /// Set when `I - e^{AT}` is close to singular (very small `T`).
    pub fn ill_conditioned(&self) -> bool {
        self.ill_conditioned
    }

    /// `(R^T)^{(m)}(t)`; `t` is reduced modulo `T` into `[0, T)`, where `t = 0`
    /// is the right limit.
    pub fn eval(&self, m: usize, t: S) -> Result<S> {
        check_order(m)?;
        Ok(self.eval_all(t)?[m])
    }

    /// All four derivative orders at `t`.
    pub fn eval_all(&self, t: S) -> Result<[S; 4]> {
        let period = self.period;
        let mut tau = t % period;
        if tau < S::zero() {
            tau += period;
        }
        if tau >= period {
            tau = S::zero();
        }
        let a = self.base.sys.a();
        let fwd = expm(a, tau)?.mul_vec(&self.qc);
        let bwd = expm(a, period - tau)?.mul_vec(&self.qc);
        let mut out = [S::zero(); 4];
        for (m, slot) in out.iter_mut().enumerate() {
            let cm = &self.base.c_pows[m];
            let sign = if m % 2 == 0 { S::one() } else { -S::one() };
            *slot = dot(cm, &fwd) + sign * dot(cm, &bwd);
        }
        Ok(out)
    }

    /// `R^T(jT/N)` for `j = 0..N`.
    pub fn sample(&self, m: usize, count: usize) -> Result<Vec<S>> {
        check_order(m)?;
        let h = self.period / S::from_usize_lossy(count);
        (0..count).map(|j| self.eval(m, h * S::from_usize_lossy(j))).collect()
    }
}

/// Partial sum `Σ_{k=-K}^{K} R^{(m)}(t + kT)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedSum<S> {
    pub value: S,
    /// `|R^{(m)}(t + KT)| + |R^{(m)}(t - KT)|`, the size of the last pair added.
    pub last_increment: S,
}

pub fn periodized_truncation_oracle<S: Real>(
    model: &AutocorrelationModel<S>,
    period: S,
    m: usize,
    t: S,
    terms: usize,
) -> Result<TruncatedSum<S>> {
    check_order(m)?;
    if !(period > S::zero()) {
        return Err(Error::InvalidArgument(format!("period must be positive, got {period}")));
    }
    let mut value = model.deriv(m, t)?;
    let mut last_increment = value.abs();
    for k in 1..=terms {
        let shift = period * S::from_usize_lossy(k);
        let up = model.deriv(m, t + shift)?;
        let down = model.deriv(m, t - shift)?;
        value += up + down;
        last_increment = up.abs() + down.abs();
    }
    Ok(TruncatedSum {
        value,
        last_increment,
    })
}
