//! Sampled periodic signals: cyclic sign variation, periodic monotonicity,
//! the three-point determinant test on planar curves, the largest admissible
//! second-harmonic amplitude, and periodic convolution.

use crate::autocorr::{AutocorrelationModel, PeriodizedModel};
use crate::error::{Error, Result};
use crate::gain::freq_response;
use crate::linalg::StateSpace;
use crate::scalar::Real;

/// One period of `N` uniform samples `u(i T / N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPeriodicSignal<S> {
    period: S,
    samples: Vec<S>,
}

impl<S: Real> SampledPeriodicSignal<S> {
    pub fn new(period: S, samples: Vec<S>) -> Result<Self> {
        if !(period > S::zero()) || !period.is_finite() {
            return Err(Error::InvalidArgument(format!("period must be positive, got {period}")));
        }
        if samples.len() < 4 {
            return Err(Error::InvalidArgument(format!(
                "need at least 4 samples per period, got {}",
                samples.len()
            )));
        }
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite sample at index {i}")));
        }
        Ok(Self { period, samples })
    }

    /// Samples `f(t)` at `t = i T / N`.
    pub fn from_fn(period: S, n: usize, f: impl Fn(S) -> S) -> Result<Self> {
        let h = period / S::from_usize_lossy(n.max(1));
        Self::new(period, (0..n).map(|i| f(h * S::from_usize_lossy(i))).collect())
    }

    pub fn period(&self) -> S {
        self.period
    }

    pub fn samples(&self) -> &[S] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sample_time(&self, i: usize) -> S {
        self.period * S::from_usize_lossy(i) / S::from_usize_lossy(self.samples.len())
    }

    /// Cyclic forward differences `u(i+1 mod N) - u(i)`.
    pub fn differences(&self) -> Vec<S> {
        cyclic_differences(&self.samples)
    }
}

pub fn cyclic_differences<S: Real>(v: &[S]) -> Vec<S> {
    let n = v.len();
    (0..n).map(|i| v[(i + 1) % n] - v[i]).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VariationCount {
    /// Sign changes around the cycle; `-1` for the all-zero vector in
    /// non-strict counting.
    pub value: i64,
    pub strict: bool,
}

fn sign_of<S: Real>(x: S, eps: S) -> i8 {
    if x > eps {
        1
    } else if x < -eps {
        -1
    } else {
        0
    }
}

/// Cyclic sign variation of `v`. Entries with `|x| <= eps` count as zeros.
///
/// Non-strict mode deletes zeros; strict mode fills every zero with `±1` so as
/// to maximise the count.
pub fn cyclic_variation<S: Real>(v: &[S], strict: bool, eps: S) -> VariationCount {
    let signs: Vec<i8> = v.iter().map(|&x| sign_of(x, eps)).collect();
    VariationCount {
        value: if strict {
            strict_count(&signs)
        } else {
            weak_count(&signs)
        },
        strict,
    }
}

fn weak_count(signs: &[i8]) -> i64 {
    let nz: Vec<i8> = signs.iter().copied().filter(|&s| s != 0).collect();
    if nz.is_empty() {
        return -1;
    }
    let m = nz.len();
    (0..m).filter(|&i| nz[i] != nz[(i + 1) % m]).count() as i64
}

fn strict_count(signs: &[i8]) -> i64 {
    let n = signs.len() as i64;
    let Some(start) = signs.iter().position(|&s| s != 0) else {
        // a closed walk of n steps has an even number of changes
        return if n % 2 == 0 { n } else { n - 1 };
    };
    let n = signs.len();
    let mut total = 0i64;
    let mut i = start;
    loop {
        let mut j = (i + 1) % n;
        let mut zeros = 0i64;
        while signs[j] == 0 {
            zeros += 1;
            j = (j + 1) % n;
        }
        // zeros + 1 steps from sign[i] to sign[j]; parity is fixed by the ends
        let steps = zeros + 1;
        let need_odd = signs[i] != signs[j];
        total += if (steps % 2 == 1) == need_odd { steps } else { steps - 1 };
        i = j;
        if i == start {
            break;
        }
    }
    total
}

/// Periodic monotonicity via `S_c(Δu) <= 2`.
pub fn is_periodically_monotone<S: Real>(sig: &SampledPeriodicSignal<S>, strict: bool, eps: S) -> bool {
    is_pm_slice(sig.samples(), strict, eps)
}

fn is_pm_slice<S: Real>(v: &[S], strict: bool, eps: S) -> bool {
    cyclic_variation(&cyclic_differences(v), strict, eps).value <= 2
}

/// Direct check of `S_c(u - γ) <= 2` over every level `γ` at which the count
/// can change: all sample values, the midpoints between them and the values
/// just outside the range.
pub fn pm_gamma_sweep_oracle<S: Real>(sig: &SampledPeriodicSignal<S>, strict: bool, eps: S) -> bool {
    let mut levels: Vec<S> = sig.samples().to_vec();
    levels.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    levels.dedup();
    let mut candidates = levels.clone();
    candidates.extend(levels.windows(2).map(|w| S::lit(0.5) * (w[0] + w[1])));
    let span = (levels[levels.len() - 1] - levels[0]).max(S::one());
    candidates.push(levels[0] - span);
    candidates.push(levels[levels.len() - 1] + span);
    candidates.iter().all(|&g| {
        let shifted: Vec<S> = sig.samples().iter().map(|&x| x - g).collect();
        cyclic_variation(&shifted, strict, eps).value <= 2
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelTestMode {
    /// Every ordered index triple.
    Brute,
    /// Consecutive minors of the differences after deleting repeated points.
    Fast,
}

fn check_pair<S: Real>(u: &SampledPeriodicSignal<S>, du: &SampledPeriodicSignal<S>) -> Result<()> {
    if u.len() != du.len() {
        return Err(Error::InvalidArgument(format!(
            "sample counts differ: {} vs {}",
            u.len(),
            du.len()
        )));
    }
    if u.period() != du.period() {
        return Err(Error::InvalidArgument(format!(
            "periods differ: {} vs {}",
            u.period(),
            du.period()
        )));
    }
    Ok(())
}

/// `det [[1, x_i, y_i], [1, x_j, y_j], [1, x_k, y_k]]`
#[inline]
fn orient<S: Real>(x: &[S], y: &[S], i: usize, j: usize, k: usize) -> S {
    (x[j] - x[i]) * (y[k] - y[i]) - (y[j] - y[i]) * (x[k] - x[i])
}

/// Sign test on the sampled curve `γ(t) = (u(t), u̇(t))`: all determinants
/// `det [1, u(t_i), u̇(t_i)]` over `t_1 < t_2 < t_3` within one period share a
/// common sign (strict: a common nonzero sign).
///
/// When every sample lies on one line the non-strict test reduces to both
/// coordinates being periodically monotone; the strict test fails.
pub fn kernel_pmp_test<S: Real>(
    u: &SampledPeriodicSignal<S>,
    du: &SampledPeriodicSignal<S>,
    strict: bool,
    mode: KernelTestMode,
    eps: S,
) -> Result<bool> {
    check_pair(u, du)?;
    let (x, y) = (u.samples(), du.samples());
    Ok(match mode {
        KernelTestMode::Brute => brute_curve_test(x, y, strict, eps),
        KernelTestMode::Fast => fast_curve_test(x, y, strict, eps),
    })
}

fn brute_curve_test<S: Real>(x: &[S], y: &[S], strict: bool, eps: S) -> bool {
    let n = x.len();
    let (mut pos, mut neg, mut zero) = (false, false, false);
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                match sign_of(orient(x, y, i, j, k), eps) {
                    1 => pos = true,
                    -1 => neg = true,
                    _ => zero = true,
                }
                if pos && neg {
                    return false;
                }
            }
        }
    }
    if !pos && !neg {
        return !strict && is_pm_slice(x, false, eps) && is_pm_slice(y, false, eps);
    }
    !(strict && zero)
}

fn fast_curve_test<S: Real>(x: &[S], y: &[S], strict: bool, eps: S) -> bool {
    let n = x.len();
    if collinear(x, y, eps) {
        return !strict && is_pm_slice(x, false, eps) && is_pm_slice(y, false, eps);
    }
    let keep: Vec<usize> = (0..n)
        .filter(|&t| {
            let t1 = (t + 1) % n;
            sign_of(x[t1] - x[t], eps) != 0 || sign_of(y[t1] - y[t], eps) != 0
        })
        .collect();
    if strict && keep.len() < n {
        return false;
    }
    let xt: Vec<S> = keep.iter().map(|&i| x[i]).collect();
    let yt: Vec<S> = keep.iter().map(|&i| y[i]).collect();
    let m = xt.len();
    let (mut pos, mut neg, mut zero) = (false, false, false);
    for t in 0..m {
        match sign_of(orient(&xt, &yt, t, (t + 1) % m, (t + 2) % m), eps) {
            1 => pos = true,
            -1 => neg = true,
            _ => zero = true,
        }
    }
    if pos && neg || strict && zero {
        return false;
    }
    is_pm_slice(&xt, strict, eps) && is_pm_slice(&yt, strict, eps)
}

/// All points on one line, judged by the same determinant band as the brute
/// test: every triple through the first point and the point farthest from it.
fn collinear<S: Real>(x: &[S], y: &[S], eps: S) -> bool {
    let n = x.len();
    let far = (1..n)
        .max_by(|&i, &j| {
            let di = (x[i] - x[0]).powi(2) + (y[i] - y[0]).powi(2);
            let dj = (x[j] - x[0]).powi(2) + (y[j] - y[0]).powi(2);
            di.partial_cmp(&dj).expect("finite samples")
        })
        .unwrap_or(0);
    (1..n).all(|k| k == far || sign_of(orient(x, y, 0, far, k), eps) == 0)
}

/// `u_a(t) = sin(ωt) - a sin(kωt)` and its derivative on `N` samples of one
/// period `2π/ω`.
pub fn two_harmonic_pair<S: Real>(
    omega: S,
    k: u32,
    a: S,
    n: usize,
) -> Result<(SampledPeriodicSignal<S>, SampledPeriodicSignal<S>)> {
    let period = S::TAU() / omega;
    let kf = S::from_usize_lossy(k as usize);
    let u = SampledPeriodicSignal::from_fn(period, n, |t| (omega * t).sin() - a * (kf * omega * t).sin())?;
    let du = SampledPeriodicSignal::from_fn(period, n, |t| {
        omega * (omega * t).cos() - a * kf * omega * (kf * omega * t).cos()
    })?;
    Ok((u, du))
}

/// Settings for [`max_pm_amplitude`].
#[derive(Debug, Clone, Copy)]
pub struct AmplitudeSearch<S> {
    pub samples: usize,
    pub tol: S,
    pub eps: S,
}

impl<S: Real> AmplitudeSearch<S> {
    /// `256 k` samples and an absolute tolerance of `1e-4`.
    pub fn defaults(k: u32, eps: S) -> Self {
        Self {
            samples: 256 * k as usize,
            tol: S::lit(1e-4),
            eps,
        }
    }
}

const AMPLITUDE_PROBES: usize = 24;

/// Largest `a` for which `sin(ωt) - a sin(kωt)` passes the strict curve test.
///
/// The upper end is doubled from `1/16` until the test fails, then bisected to
/// `tol`. The returned value passes and `value + tol` fails. A pass/fail
/// pattern along `a` that is not a single switch is reported as
/// [`Error::Bracketing`].
pub fn max_pm_amplitude<S: Real>(omega: S, k: u32, cfg: &AmplitudeSearch<S>) -> Result<S> {
    if !(omega > S::zero()) || !omega.is_finite() {
        return Err(Error::InvalidArgument(format!("frequency must be positive, got {omega}")));
    }
    if k < 2 {
        return Err(Error::InvalidArgument(format!("harmonic index must be at least 2, got {k}")));
    }
    if cfg.samples < 32 * k as usize {
        return Err(Error::InvalidArgument(format!(
            "need at least {} samples, got {}",
            32 * k,
            cfg.samples
        )));
    }
    if !(cfg.tol > S::zero()) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {}", cfg.tol)));
    }
    let passes = |a: S| -> Result<bool> {
        let (u, du) = two_harmonic_pair(omega, k, a, cfg.samples)?;
        // per-axis scaling keeps convexity and makes eps independent of ω
        kernel_pmp_test(&unit_peak(&u)?, &unit_peak(&du)?, true, KernelTestMode::Fast, cfg.eps)
    };
    if !passes(S::zero())? {
        return Err(Error::Bracketing("the pure sinusoid a = 0 already fails the curve test".into()));
    }
    let mut lo = S::zero();
    let mut hi = S::lit(1.0 / 16.0);
    let mut doublings = 0;
    while passes(hi)? {
        lo = hi;
        hi *= S::lit(2.0);
        doublings += 1;
        if doublings > 40 {
            return Err(Error::Bracketing(format!("test still passes at a = {hi}")));
        }
    }
    let upper = hi;
    while hi - lo > cfg.tol {
        let mid = S::lit(0.5) * (lo + hi);
        if passes(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // coarse scan for a second switch
    let mut seen_fail = false;
    for i in 0..=AMPLITUDE_PROBES {
        let a = upper * S::from_usize_lossy(i) / S::from_usize_lossy(AMPLITUDE_PROBES);
        let ok = passes(a)?;
        let expected = a <= lo;
        if ok && seen_fail || ok != expected && (a - lo).abs() > cfg.tol {
            return Err(Error::Bracketing(format!(
                "pass/fail is not monotone in a: a = {a} {} while the bisection boundary is {lo}",
                if ok { "passes" } else { "fails" }
            )));
        }
        seen_fail |= !ok;
    }
    Ok(lo)
}

fn unit_peak<S: Real>(sig: &SampledPeriodicSignal<S>) -> Result<SampledPeriodicSignal<S>> {
    let peak = sig.samples().iter().fold(S::zero(), |m, v| m.max(v.abs()));
    if peak == S::zero() {
        return Ok(sig.clone());
    }
    SampledPeriodicSignal::new(sig.period(), sig.samples().iter().map(|&v| v / peak).collect())
}

/// `y(i) = (T/N) Σ_j kernel(i - j mod N) u(j)`
pub fn circular_convolve<S: Real>(
    kernel: &SampledPeriodicSignal<S>,
    u: &SampledPeriodicSignal<S>,
) -> Result<SampledPeriodicSignal<S>> {
    check_pair(kernel, u)?;
    let n = u.len();
    let w = u.period() / S::from_usize_lossy(n);
    let (kv, uv) = (kernel.samples(), u.samples());
    let out = (0..n)
        .map(|i| {
            let mut acc = S::zero();
            for j in 0..n {
                acc += kv[(i + n - j) % n] * uv[j];
            }
            acc * w
        })
        .collect();
    SampledPeriodicSignal::new(u.period(), out)
}

/// Largest pointwise gap between the sampled periodic convolution of the
/// periodized autocorrelation with `sin(ωt) - a sin(kωt)` and the exact output
/// `|G(iω)|² sin(ωt) - a |G(ikω)|² sin(kωt)`.
pub fn verify_monotone_gain_identity<S: Real>(
    sys: &StateSpace<S>,
    omega: S,
    k: u32,
    a: S,
    n: usize,
) -> Result<S> {
    if !(omega > S::zero()) {
        return Err(Error::InvalidArgument(format!("frequency must be positive, got {omega}")));
    }
    let model = AutocorrelationModel::build(sys)?;
    let period = S::TAU() / omega;
    let pm = PeriodizedModel::build(&model, period)?;
    let kernel = SampledPeriodicSignal::new(period, pm.sample(0, n)?)?;
    let kf = S::from_usize_lossy(k as usize);
    let u = SampledPeriodicSignal::from_fn(period, n, |t| (omega * t).sin() - a * (kf * omega * t).sin())?;
    let y = circular_convolve(&kernel, &u)?;
    let g1 = freq_response(sys, omega)?.norm_sqr();
    let gk = freq_response(sys, kf * omega)?.norm_sqr();
    Ok(y
        .samples()
        .iter()
        .enumerate()
        .map(|(i, &yi)| {
            let t = y.sample_time(i);
            (yi - (g1 * (omega * t).sin() - a * gk * (kf * omega * t).sin())).abs()
        })
        .fold(S::zero(), S::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 1e-8;

    fn var(v: &[f64], strict: bool) -> i64 {
        cyclic_variation(v, strict, EPS).value
    }

    fn sig(v: Vec<f64>) -> SampledPeriodicSignal<f64> {
        SampledPeriodicSignal::new(1.0, v).unwrap()
    }

    #[test]
    fn variation_examples() {
        assert_eq!(var(&[1.0, 0.0, 2.0], false), 0);
        assert_eq!(var(&[1.0, 0.0, 2.0], true), 2);
        assert_eq!(var(&[1.0, -1.0, 1.0, -1.0], false), 4);
        assert_eq!(var(&[1.0, -1.0, 1.0, -1.0], true), 4);
        assert_eq!(var(&[0.0, 0.0, 0.0], false), -1);
        assert_eq!(var(&[5.0], false), 0);
        assert_eq!(var(&[1.0, 1e-12, -1.0], false), 2);
    }

    #[test]
    fn strict_fills_zero_runs() {
        // +, 0, 0, - : three steps with an odd number of changes, all three used
        assert_eq!(var(&[1.0, 0.0, 0.0, -1.0], true), 4);
        assert_eq!(var(&[1.0, 0.0, 0.0, 1.0], true), 2);
        assert_eq!(var(&[0.0, 0.0, 0.0, 0.0], true), 4);
        assert_eq!(var(&[0.0; 5], true), 4);
    }

    #[test]
    fn pm_examples() {
        let n = 256;
        let s = SampledPeriodicSignal::from_fn(1.0, 64, |t: f64| (std::f64::consts::TAU * t).sin()).unwrap();
        assert!(is_periodically_monotone(&s, false, EPS));
        assert!(is_periodically_monotone(&s, true, EPS));
        let two = SampledPeriodicSignal::from_fn(1.0, n, |t: f64| {
            (std::f64::consts::TAU * t).sin() + 0.6 * (2.0 * std::f64::consts::TAU * t).sin()
        })
        .unwrap();
        assert!(!is_periodically_monotone(&two, false, EPS));
        assert!(!pm_gamma_sweep_oracle(&two, false, EPS));
        let flat = sig(vec![2.0; 8]);
        assert!(is_periodically_monotone(&flat, false, EPS));
        assert!(pm_gamma_sweep_oracle(&flat, false, EPS));
    }

    #[test]
    fn triangle_wave_is_pm() {
        let tri = sig(vec![0.0, 1.0, 2.0, 3.0, 2.0, 1.0]);
        assert!(is_periodically_monotone(&tri, true, EPS));
        assert!(pm_gamma_sweep_oracle(&tri, true, EPS));
    }

    #[test]
    fn sinusoid_curve_has_negative_orientation() {
        let (u, du) = two_harmonic_pair(1.0, 2, 0.0, 64).unwrap();
        let x = u.samples();
        let y = du.samples();
        assert!(orient(x, y, 0, 10, 30) < 0.0);
        for mode in [KernelTestMode::Brute, KernelTestMode::Fast] {
            assert!(kernel_pmp_test(&u, &du, true, mode, EPS).unwrap());
        }
    }

    #[test]
    fn small_and_large_second_harmonic() {
        for mode in [KernelTestMode::Brute, KernelTestMode::Fast] {
            let (u, du) = two_harmonic_pair(1.0, 2, 0.05, 128).unwrap();
            assert!(kernel_pmp_test(&u, &du, false, mode, EPS).unwrap());
            let (u, du) = two_harmonic_pair(1.0, 2, 10.0, 128).unwrap();
            assert!(!kernel_pmp_test(&u, &du, false, mode, EPS).unwrap());
        }
    }

    #[test]
    fn repeated_points_need_deletion() {
        // the 7-periodic polygon with every vertex doubled: PM coordinates,
        // zero consecutive minors, yet the polygon self-intersects
        let x = sig(vec![0.0, 1.0, 1.0, 1.0, 1.0, 0.5, 0.5]);
        let y = sig(vec![0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0]);
        let brute = kernel_pmp_test(&x, &y, false, KernelTestMode::Brute, EPS).unwrap();
        let fast = kernel_pmp_test(&x, &y, false, KernelTestMode::Fast, EPS).unwrap();
        assert!(!brute);
        assert_eq!(brute, fast);
    }

    #[test]
    fn collinear_curves() {
        let x = sig(vec![0.0, 1.0, 2.0, 1.0]);
        let y = sig(vec![0.0, 2.0, 4.0, 2.0]);
        for mode in [KernelTestMode::Brute, KernelTestMode::Fast] {
            assert!(kernel_pmp_test(&x, &y, false, mode, EPS).unwrap());
            assert!(!kernel_pmp_test(&x, &y, true, mode, EPS).unwrap());
        }
    }

    #[test]
    fn mismatched_signals_are_rejected() {
        let a = sig(vec![0.0; 4]);
        let b = sig(vec![0.0; 5]);
        assert!(kernel_pmp_test(&a, &b, false, KernelTestMode::Fast, EPS).is_err());
        assert!(circular_convolve(&a, &b).is_err());
        assert!(SampledPeriodicSignal::new(1.0, vec![0.0; 3]).is_err());
    }

    #[test]
    fn amplitude_search_near_one_eighth() {
        let cfg = AmplitudeSearch::defaults(2, EPS);
        let a = max_pm_amplitude(1.0, 2, &cfg).unwrap();
        assert!(a > 0.1 && a < 0.126, "a = {a}");
        let pass = |a: f64| {
            let (u, du) = two_harmonic_pair(1.0, 2, a, cfg.samples).unwrap();
            kernel_pmp_test(&unit_peak(&u).unwrap(), &unit_peak(&du).unwrap(), true, KernelTestMode::Fast, EPS)
                .unwrap()
        };
        assert!(pass(a - cfg.tol));
        assert!(!pass(a + cfg.tol));
    }

    #[test]
    fn convolution_basics() {
        let n = 64;
        let period = 2.0;
        let mut pulse = vec![0.0; n];
        pulse[0] = n as f64 / period;
        let kernel = SampledPeriodicSignal::new(period, pulse).unwrap();
        let u = SampledPeriodicSignal::from_fn(period, n, |t: f64| (std::f64::consts::PI * t).sin() + 0.3).unwrap();
        let y = circular_convolve(&kernel, &u).unwrap();
        for (a, b) in y.samples().iter().zip(u.samples()) {
            assert!((a - b).abs() < 1e-14);
        }
        let ones = SampledPeriodicSignal::new(period, vec![1.0; n]).unwrap();
        let s = SampledPeriodicSignal::from_fn(period, n, |t: f64| (std::f64::consts::PI * t).sin()).unwrap();
        assert!(circular_convolve(&ones, &s).unwrap().samples().iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn gain_identity_first_order() {
        let sys = StateSpace::<f64>::from_f64(&[&[-1.0]], &[1.0], &[1.0]).unwrap();
        let d1 = verify_monotone_gain_identity(&sys, 1.0, 2, 0.1, 1024).unwrap();
        let d2 = verify_monotone_gain_identity(&sys, 1.0, 2, 0.1, 2048).unwrap();
        assert!(d1 < 1e-4, "d1 = {d1}");
        let ratio = d1 / d2;
        assert!(ratio > 3.5 && ratio < 4.5, "ratio = {ratio}");
    }
}
