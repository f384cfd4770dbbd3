//! Frequency response `G(iω) = c (iωI - A)⁻¹ b` and magnitude comparisons
//! between frequencies.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{log_grid, resolvent_apply, StateSpace};
use crate::scalar::Real;

/// `G(iω)`.
pub fn freq_response<S: Real>(sys: &StateSpace<S>, omega: S) -> Result<Complex<S>> {
    Ok(freq_response_checked(sys, omega)?.0)
}

/// `G(iω)` and whether the underlying solve was ill-conditioned.
pub fn freq_response_checked<S: Real>(sys: &StateSpace<S>, omega: S) -> Result<(Complex<S>, bool)> {
    let sol = resolvent_apply(sys.a(), sys.b(), omega)?;
    let mut g = sys
        .c()
        .iter()
        .zip(&sol.x)
        .fold(Complex::new(S::zero(), S::zero()), |acc, (&ci, &xi)| acc + xi * ci);
    if omega == S::zero() {
        g.im = S::zero();
    }
    Ok((g, sol.ill_conditioned))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GainVerdict {
    Holds,
    Violated,
}

impl GainVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            GainVerdict::Holds => "holds",
            GainVerdict::Violated => "violated",
        }
    }
}

/// One comparison `|G(i ω_ref)| >= |G(i ω_cmp)|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainPair<S> {
    /// Harmonic number, octave exponent or grid position, depending on the check.
    pub index: i64,
    pub omega_ref: S,
    pub omega_cmp: S,
    pub mag_ref: S,
    pub mag_cmp: S,
    /// `mag_ref - mag_cmp`
    pub slack: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport<S> {
    pub base_omega: S,
    pub pairs: Vec<GainPair<S>>,
    pub verdict: GainVerdict,
    pub witnesses: Vec<GainPair<S>>,
    /// Slack band `eps * max magnitude` below which a pair counts as violated.
    pub band: S,
    /// Set when any resolvent solve was ill-conditioned.
    pub ill_conditioned: bool,
}

impl<S: Real> MonotonicityReport<S> {
    fn assemble(base_omega: S, pairs: Vec<GainPair<S>>, eps: S, ill_conditioned: bool) -> Self {
        let max_mag = pairs
            .iter()
            .fold(S::zero(), |m, p| m.max(p.mag_ref).max(p.mag_cmp));
        let band = eps * max_mag;
        let witnesses: Vec<GainPair<S>> = pairs.iter().copied().filter(|p| p.slack < -band).collect();
        let verdict = if witnesses.is_empty() {
            GainVerdict::Holds
        } else {
            GainVerdict::Violated
        };
        Self {
            base_omega,
            pairs,
            verdict,
            witnesses,
            band,
            ill_conditioned,
        }
    }

    pub fn holds(&self) -> bool {
        self.verdict == GainVerdict::Holds
    }

    /// Smallest slack over all pairs.
    pub fn min_slack(&self) -> S {
        self.pairs.iter().fold(S::infinity(), |m, p| m.min(p.slack))
    }
}

struct Magnitudes<'a, S> {
    sys: &'a StateSpace<S>,
    ill: bool,
}

impl<S: Real> Magnitudes<'_, S> {
    fn at(&mut self, omega: S) -> Result<S> {
        let (g, ill) = freq_response_checked(self.sys, omega)?;
        self.ill |= ill;
        Ok(g.norm())
    }

    fn pair(&mut self, index: i64, omega_ref: S, omega_cmp: S) -> Result<GainPair<S>> {
        let mag_ref = self.at(omega_ref)?;
        let mag_cmp = self.at(omega_cmp)?;
        Ok(GainPair {
            index,
            omega_ref,
            omega_cmp,
            mag_ref,
            mag_cmp,
            slack: mag_ref - mag_cmp,
        })
    }
}

/// `|G(iω)| >= |G(ikω)|` for `k = 1..=k_max`.
pub fn harmonic_dominance_check<S: Real>(
    sys: &StateSpace<S>,
    omega: S,
    k_max: u32,
    eps: S,
) -> Result<MonotonicityReport<S>> {
    if !(omega > S::zero()) || !omega.is_finite() {
        return Err(Error::InvalidArgument(format!("frequency must be positive, got {omega}")));
    }
    if k_max < 2 {
        return Err(Error::InvalidArgument(format!("k_max must be at least 2, got {k_max}")));
    }
    let mut mags = Magnitudes { sys, ill: false };
    let pairs = (1..=k_max)
        .map(|k| mags.pair(k as i64, omega, omega * S::from_usize_lossy(k as usize)))
        .collect::<Result<Vec<_>>>()?;
    Ok(MonotonicityReport::assemble(omega, pairs, eps, mags.ill))
}

/// `|G(i 2^k ω)| >= |G(i 2^{k+1} ω)|` for `k_lo <= k < k_hi`.
pub fn octave_monotonicity_check<S: Real>(
    sys: &StateSpace<S>,
    omega: S,
    k_lo: i32,
    k_hi: i32,
    eps: S,
) -> Result<MonotonicityReport<S>> {
    if !(omega > S::zero()) || !omega.is_finite() {
        return Err(Error::InvalidArgument(format!("frequency must be positive, got {omega}")));
    }
    if k_lo >= k_hi {
        return Err(Error::InvalidArgument(format!("empty octave range {k_lo}..{k_hi}")));
    }
    let two = S::lit(2.0);
    let mut mags = Magnitudes { sys, ill: false };
    let pairs = (k_lo..k_hi)
        .map(|k| mags.pair(k as i64, omega * two.powi(k), omega * two.powi(k + 1)))
        .collect::<Result<Vec<_>>>()?;
    Ok(MonotonicityReport::assemble(omega, pairs, eps, mags.ill))
}

/// `|G(iω)| <= |G(0)|` at every grid frequency.
pub fn positive_domination_verify<S: Real>(
    sys: &StateSpace<S>,
    omegas: &[S],
    eps: S,
) -> Result<MonotonicityReport<S>> {
    if omegas.is_empty() {
        return Err(Error::InvalidArgument("empty frequency grid".into()));
    }
    let mut mags = Magnitudes { sys, ill: false };
    let dc = mags.at(S::zero())?;
    let pairs = omegas
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            let m = mags.at(w)?;
            Ok(GainPair {
                index: i as i64,
                omega_ref: S::zero(),
                omega_cmp: w,
                mag_ref: dc,
                mag_cmp: m,
                slack: dc - m,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MonotonicityReport::assemble(S::zero(), pairs, eps, mags.ill))
}

/// Default sweep points per [`default_sweep_range`].
pub const DEFAULT_SWEEP_POINTS: usize = 2001;

/// Decade-aligned `[lo, hi]` reaching two decades below the slowest mode and
/// two above the spectral radius.
pub fn default_sweep_range<S: Real>(sys: &StateSpace<S>) -> (S, S) {
    let slow = -sys.abscissa();
    let fast = sys.eigenvalues().iter().fold(slow, |m, z| m.max(z.norm()));
    let ten = S::lit(10.0);
    let lo = ten.powf((slow / S::lit(100.0)).log10().floor());
    let hi = ten.powf((fast * S::lit(100.0)).log10().ceil());
    (lo, hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GainSweep<S> {
    pub frequencies: Vec<S>,
    pub responses: Vec<Complex<S>>,
    pub magnitudes: Vec<S>,
    pub ill_conditioned: bool,
}

pub fn gain_sweep<S: Real>(
    sys: &StateSpace<S>,
    lo: S,
    hi: S,
    points: usize,
    spacing: Spacing,
) -> Result<GainSweep<S>> {
    if !(lo >= S::zero()) || !(hi > lo) || !hi.is_finite() || points < 2 {
        return Err(Error::InvalidArgument(format!(
            "invalid sweep range [{lo}, {hi}] with {points} points"
        )));
    }
    let frequencies = match spacing {
        Spacing::Log => {
            if !(lo > S::zero()) {
                return Err(Error::InvalidArgument("log spacing needs a positive lower frequency".into()));
            }
            log_grid(lo, hi, points)
        }
        Spacing::Linear => {
            let last = S::from_usize_lossy(points - 1);
            (0..points)
                .map(|i| lo + (hi - lo) * S::from_usize_lossy(i) / last)
                .collect()
        }
    };
    if frequencies.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument(format!(
            "sweep [{lo}, {hi}] with {points} points does not give increasing frequencies"
        )));
    }
    let mut ill_conditioned = false;
    let mut responses = Vec::with_capacity(points);
    for &w in &frequencies {
        let (g, ill) = freq_response_checked(sys, w)?;
        ill_conditioned |= ill;
        responses.push(g);
    }
    let magnitudes = responses.iter().map(|g| g.norm()).collect();
    Ok(GainSweep {
        frequencies,
        responses,
        magnitudes,
        ill_conditioned,
    })
}
