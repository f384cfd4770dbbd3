//! Sampled decisions of pointwise sign conditions on the autocorrelation and
//! related impulse responses, with an asymptotic tail analysis standing in for
//! "all t beyond the grid".

pub mod tail;

use crate::autocorr::AutocorrelationModel;
use crate::error::{Error, Result};
use crate::linalg::compound::{additive_compound2, wedge};
use crate::linalg::lu::Lu;
use crate::linalg::matrix::{dot, norm2};
use crate::linalg::{expm, spectral_abscissa, Matrix, SpectralInfo, StateSpace};
use crate::scalar::{Real, Tolerances};
use crate::signals::{kernel_pmp_test, KernelTestMode, SampledPeriodicSignal};

pub use tail::{tail_sign, TailAnalysis, TailSign};

/// Grid horizon in units of `1/σ` required by the asymptotic tail policy.
pub const HORIZON_DECAY_UNITS: f64 = 20.0;
pub const DEFAULT_GRID_POINTS: usize = 4096;
pub const MIN_GRID_POINTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailPolicy {
    /// Decide `t > t_max` from the slowest contributing mode.
    AsymptoticSign,
    /// Never claim anything beyond `t_max`: "holds" is capped at inconclusive.
    DeclaredInconclusive,
}

impl TailPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            TailPolicy::AsymptoticSign => "asymptotic-sign",
            TailPolicy::DeclaredInconclusive => "declared-inconclusive",
        }
    }
}

/// Uniform grid `t_i = i t_max / N`, `i = 1..=N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckGrid<S> {
    pub t_max: S,
    pub points: usize,
    pub tail_policy: TailPolicy,
}

impl<S: Real> CheckGrid<S> {
    pub fn new(t_max: S, points: usize, tail_policy: TailPolicy) -> Result<Self> {
        if !(t_max > S::zero()) || !t_max.is_finite() {
            return Err(Error::InvalidArgument(format!("grid horizon must be positive, got {t_max}")));
        }
        if points < MIN_GRID_POINTS {
            return Err(Error::InvalidArgument(format!(
                "grid needs at least {MIN_GRID_POINTS} points, got {points}"
            )));
        }
        Ok(Self {
            t_max,
            points,
            tail_policy,
        })
    }

    /// `t_max = 20/σ`, 4096 points, asymptotic tail policy.
    pub fn default_for(spectral: &SpectralInfo<S>) -> Self {
        Self {
            t_max: required_horizon(spectral),
            points: DEFAULT_GRID_POINTS,
            tail_policy: TailPolicy::AsymptoticSign,
        }
    }

    pub fn spacing(&self) -> S {
        self.t_max / S::from_usize_lossy(self.points)
    }

    pub fn with_points(mut self, points: usize) -> Self {
        self.points = points;
        self
    }

    pub fn time(&self, i: usize) -> S {
        self.spacing() * S::from_usize_lossy(i)
    }
}

pub fn required_horizon<S: Real>(spectral: &SpectralInfo<S>) -> S {
    S::lit(HORIZON_DECAY_UNITS) / spectral.decay_sigma
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Inconclusive => "inconclusive",
        }
    }

    fn severity(self) -> u8 {
        match self {
            Verdict::Holds => 0,
            Verdict::Inconclusive => 1,
            Verdict::Fails => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionResult<S> {
    pub name: &'static str,
    pub min_margin: S,
    pub argmin_t: S,
    pub verdict: Verdict,
    /// Minimum within the `eps` band around zero.
    pub boundary: bool,
    pub tail: Option<TailSign>,
    pub tail_note: String,
    /// Positivity side condition `(min, argmin)` of `R(t) / (|c| |e^{At} P cᵀ|)`,
    /// reported by the log-concavity check only.
    pub positivity: Option<(S, S)>,
}

impl<S: Real> ConditionResult<S> {
    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PmpVerdict {
    CertifiedViaI,
    CertifiedViaII,
    Failed,
    Inconclusive,
}

impl PmpVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            PmpVerdict::CertifiedViaI => "certified-via-i",
            PmpVerdict::CertifiedViaII => "certified-via-ii",
            PmpVerdict::Failed => "failed",
            PmpVerdict::Inconclusive => "inconclusive",
        }
    }

    pub fn is_certified(self) -> bool {
        matches!(self, PmpVerdict::CertifiedViaI | PmpVerdict::CertifiedViaII)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PmpCertificate<S> {
    pub logconv_der: ConditionResult<S>,
    pub convexity: ConditionResult<S>,
    pub logconcavity: ConditionResult<S>,
    pub verdict: PmpVerdict,
}

/// Running minimum with ties going to the earliest time.
struct MinTracker<S> {
    value: S,
    at: S,
}

impl<S: Real> MinTracker<S> {
    fn new() -> Self {
        Self {
            value: S::infinity(),
            at: S::zero(),
        }
    }

    fn push(&mut self, t: S, v: S) {
        if v < self.value || v.is_nan() {
            self.value = v;
            self.at = t;
        }
    }
}

/// Margin samples of one condition.
struct Samples<S> {
    /// Right limit at `t = 0`, when the condition includes the origin.
    origin: Option<S>,
    /// `(t_i, margin_i)` for `i = 1..=N`.
    interior: Vec<(S, S)>,
}

impl<S: Real> Samples<S> {
    /// Interior witnesses are preferred: the origin only decides when it is
    /// the sole violation.
    fn minimum(&self, eps: S) -> (S, S) {
        let mut inner = MinTracker::new();
        for &(t, v) in &self.interior {
            inner.push(t, v);
        }
        match self.origin {
            Some(v0) if !(inner.value < -eps) && v0 < inner.value => (v0, S::zero()),
            _ => (inner.value, inner.at),
        }
    }
}

struct Decision<'a, S> {
    grid: &'a CheckGrid<S>,
    horizon_ok: bool,
    eps: S,
}

impl<S: Real> Decision<'_, S> {
    fn decide(&self, name: &'static str, samples: &Samples<S>, tail: Result<TailAnalysis<S>>) -> ConditionResult<S> {
        let (min_margin, argmin_t) = samples.minimum(self.eps);
        let mut result = ConditionResult {
            name,
            min_margin,
            argmin_t,
            verdict: Verdict::Holds,
            boundary: min_margin.abs() <= self.eps,
            tail: None,
            tail_note: String::new(),
            positivity: None,
        };
        if !(min_margin >= -self.eps) {
            result.verdict = Verdict::Fails;
            result.boundary = false;
            result.tail_note = "violation found on the grid".into();
            return result;
        }
        let (verdict, tail_sign, note) = self.judge_tail(tail);
        result.verdict = verdict;
        result.tail = tail_sign;
        result.tail_note = note;
        result
    }

    fn judge_tail(&self, tail: Result<TailAnalysis<S>>) -> (Verdict, Option<TailSign>, String) {
        if self.grid.tail_policy == TailPolicy::DeclaredInconclusive {
            return (
                Verdict::Inconclusive,
                None,
                "tail beyond t_max not analysed (declared-inconclusive policy)".into(),
            );
        }
        let analysis = match tail {
            Ok(a) => a,
            Err(e) => return (Verdict::Inconclusive, None, format!("tail analysis failed: {e}")),
        };
        let note = analysis.describe();
        if !self.horizon_ok {
            return (
                Verdict::Inconclusive,
                Some(analysis.sign),
                format!("grid horizon is shorter than {HORIZON_DECAY_UNITS}/sigma; {note}"),
            );
        }
        let verdict = match analysis.sign {
            TailSign::Positive | TailSign::Zero => Verdict::Holds,
            TailSign::Negative | TailSign::Oscillatory => Verdict::Inconclusive,
        };
        (verdict, Some(analysis.sign), note)
    }
}

/// `R̈² - Ṙ R⃛` from `[R, Ṙ, R̈, R⃛]`.
pub fn logconv_margin_from<S: Real>(d: &[S; 4]) -> S {
    d[2] * d[2] - d[1] * d[3]
}

/// `Ṙ² - R R̈`
pub fn logconcavity_margin_from<S: Real>(d: &[S; 4]) -> S {
    d[1] * d[1] - d[0] * d[2]
}

pub fn logconv_margin<S: Real>(model: &AutocorrelationModel<S>, t: S) -> Result<S> {
    Ok(logconv_margin_from(&model.derivs(t)?))
}

pub fn logconcavity_margin<S: Real>(model: &AutocorrelationModel<S>, t: S) -> Result<S> {
    Ok(logconcavity_margin_from(&model.derivs(t)?))
}

/// `R(t) / (|c| |e^{At} P cᵀ|)`, a scale-free positivity measure.
pub fn positivity_ratio<S: Real>(model: &AutocorrelationModel<S>, t: S) -> Result<S> {
    let x = expm(model.system().a(), t.abs())?.mul_vec(model.gramian_c());
    Ok(ratio_of(model, &x))
}

fn ratio_of<S: Real>(model: &AutocorrelationModel<S>, x: &[S]) -> S {
    let den = norm2(model.system().c()) * norm2(x);
    if den > S::zero() {
        dot(model.system().c(), x) / den
    } else {
        S::zero()
    }
}

struct GridData<S> {
    times: Vec<S>,
    states: Vec<Vec<S>>,
    derivs: Vec<[S; 4]>,
}

fn evaluate<S: Real>(model: &AutocorrelationModel<S>, grid: &CheckGrid<S>) -> Result<GridData<S>> {
    let states = model.states_on_uniform_grid(grid.spacing(), grid.points + 1)?;
    let derivs = states.iter().map(|x| model.derivs_from_state(x)).collect();
    Ok(GridData {
        times: (0..=grid.points).map(|i| grid.time(i)).collect(),
        states,
        derivs,
    })
}

fn samples_from<S: Real>(data: &GridData<S>, with_origin: bool, f: impl Fn(usize) -> S) -> Samples<S> {
    Samples {
        origin: with_origin.then(|| f(0)),
        interior: (1..data.times.len()).map(|i| (data.times[i], f(i))).collect(),
    }
}

/// Decision band `eval_eps · R(0)^degree`, so that verdicts do not depend on
/// the output scaling of a margin that is homogeneous of that degree in `R`.
fn decision<'a, S: Real>(model: &AutocorrelationModel<S>, grid: &'a CheckGrid<S>, degree: i32) -> Decision<'a, S> {
    let required = required_horizon(model.spectral());
    Decision {
        grid,
        horizon_ok: grid.t_max >= required * (S::one() - S::lit(1e-12)),
        eps: model.tolerances().eval_eps * model.r0().powi(degree),
    }
}

/// Compound data `(A^{[2]}, u∧v, w∧x)` for `det([u; v] e^{At} [w x])`.
fn compound_pair<S: Real>(a: &Matrix<S>, u: &[S], v: &[S], w: &[S], x: &[S]) -> (Matrix<S>, Vec<S>, Vec<S>) {
    (additive_compound2(a), wedge(u, v), wedge(w, x))
}

fn apc<S: Real>(model: &AutocorrelationModel<S>) -> Vec<S> {
    model.system().a().mul_vec(model.gramian_c())
}

fn logconv_tail<S: Real>(model: &AutocorrelationModel<S>) -> Result<TailAnalysis<S>> {
    let (m, p, q) = compound_pair(
        model.system().a(),
        model.c_power(1),
        model.c_power(2),
        model.gramian_c(),
        &apc(model),
    );
    let neg: Vec<S> = p.iter().map(|&x| -x).collect();
    tail_sign(&m, &neg, &q)
}

fn logconcavity_tail<S: Real>(model: &AutocorrelationModel<S>) -> Result<TailAnalysis<S>> {
    let (m, p, q) = compound_pair(
        model.system().a(),
        model.c_power(0),
        model.c_power(1),
        model.gramian_c(),
        &apc(model),
    );
    let neg: Vec<S> = p.iter().map(|&x| -x).collect();
    tail_sign(&m, &neg, &q)
}

fn logconv_on<S: Real>(model: &AutocorrelationModel<S>, grid: &CheckGrid<S>, data: &GridData<S>) -> ConditionResult<S> {
    let samples = samples_from(data, false, |i| logconv_margin_from(&data.derivs[i]));
    decision(model, grid, 2).decide("logconv_der", &samples, logconv_tail(model))
}

fn convexity_on<S: Real>(model: &AutocorrelationModel<S>, grid: &CheckGrid<S>, data: &GridData<S>) -> ConditionResult<S> {
    let samples = samples_from(data, true, |i| data.derivs[i][2]);
    let tail = tail_sign(model.system().a(), model.c_power(2), model.gramian_c());
    decision(model, grid, 1).decide("convexity", &samples, tail)
}

fn logconcavity_on<S: Real>(
    model: &AutocorrelationModel<S>,
    grid: &CheckGrid<S>,
    data: &GridData<S>,
) -> ConditionResult<S> {
    let dec = decision(model, grid, 0);
    let eps = dec.eps;
    let pos_samples = samples_from(data, true, |i| ratio_of(model, &data.states[i]));
    let pos_tail = tail_sign(model.system().a(), model.c_power(0), model.gramian_c());
    let mut positivity = dec.decide("logconcavity", &pos_samples, pos_tail);
    // strict positivity: a minimum inside the band is not enough
    if positivity.verdict == Verdict::Holds && !(positivity.min_margin > eps) {
        positivity.verdict = Verdict::Inconclusive;
        positivity.tail_note = format!(
            "R(t) is not bounded away from zero on the grid (normalised minimum {:.6e}); {}",
            positivity.min_margin.as_f64(),
            positivity.tail_note
        );
    }
    if positivity.tail == Some(TailSign::Zero) && positivity.verdict == Verdict::Holds {
        positivity.verdict = Verdict::Inconclusive;
    }
    let pos_summary = (positivity.min_margin, positivity.argmin_t);
    let samples = samples_from(data, true, |i| logconcavity_margin_from(&data.derivs[i]));
    let margin = decision(model, grid, 2).decide("logconcavity", &samples, logconcavity_tail(model));
    let mut out = if positivity.verdict.severity() > margin.verdict.severity() {
        let mut p = positivity;
        p.tail_note = format!("positivity: {}", p.tail_note);
        p
    } else {
        margin
    };
    out.positivity = Some(pos_summary);
    out
}

/// `R̈² >= Ṙ R⃛` on `(0, t_max]` and beyond.
pub fn check_logconv_der<S: Real>(model: &AutocorrelationModel<S>, grid: &CheckGrid<S>) -> Result<ConditionResult<S>> {
    let data = evaluate(model, grid)?;
    Ok(logconv_on(model, grid, &data))
}

/// `R̈ >= 0` on `[0, t_max]` and beyond.
pub fn check_convexity<S: Real>(model: &AutocorrelationModel<S>, grid: &CheckGrid<S>) -> Result<ConditionResult<S>> {
    let data = evaluate(model, grid)?;
    Ok(convexity_on(model, grid, &data))
}

/// `R > 0` and `Ṙ² >= R R̈` on `[0, t_max]` and beyond.
pub fn check_logconcavity<S: Real>(model: &AutocorrelationModel<S>, grid: &CheckGrid<S>) -> Result<ConditionResult<S>> {
    let data = evaluate(model, grid)?;
    Ok(logconcavity_on(model, grid, &data))
}

/// Combines the three checks: the derivative condition together with either
/// convexity (preferred) or log-concavity.
pub fn certify_pmp<S: Real>(model: &AutocorrelationModel<S>, grid: &CheckGrid<S>) -> Result<PmpCertificate<S>> {
    let data = evaluate(model, grid)?;
    let logconv_der = logconv_on(model, grid, &data);
    let convexity = convexity_on(model, grid, &data);
    let logconcavity = logconcavity_on(model, grid, &data);
    let both_items_fail = convexity.verdict == Verdict::Fails && logconcavity.verdict == Verdict::Fails;
    let verdict = match logconv_der.verdict {
        Verdict::Fails => PmpVerdict::Failed,
        _ if both_items_fail => PmpVerdict::Failed,
        Verdict::Inconclusive => PmpVerdict::Inconclusive,
        Verdict::Holds if convexity.holds() => PmpVerdict::CertifiedViaI,
        Verdict::Holds if logconcavity.holds() => PmpVerdict::CertifiedViaII,
        Verdict::Holds => PmpVerdict::Inconclusive,
    };
    Ok(PmpCertificate {
        logconv_der,
        convexity,
        logconcavity,
        verdict,
    })
}

/// External positivity of `(A, P cᵀ, c)`: `c e^{At} P cᵀ >= 0` for `t >= 0`.
pub fn check_positive_domination<S: Real>(
    sys: &StateSpace<S>,
    grid: &CheckGrid<S>,
    tol: Tolerances<S>,
) -> Result<ConditionResult<S>> {
    let model = AutocorrelationModel::build_with(sys, tol)?;
    let data = evaluate(&model, grid)?;
    let samples = samples_from(&data, true, |i| data.derivs[i][0]);
    let tail = tail_sign(sys.a(), sys.c(), model.gramian_c());
    Ok(decision(&model, grid, 1).decide("positive_domination", &samples, tail))
}

/// Outcome of the single-period kernel sufficiency test.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSufficiency<S> {
    pub period: S,
    pub samples: usize,
    /// `Holds` when the sampled periodized impulse response passes the curve
    /// test, otherwise `Inconclusive`: the test is sufficient only.
    pub verdict: Verdict,
}

/// Samples `g^T(t) = c e^{At} (I - e^{AT})⁻¹ b` and its derivative on one
/// period and runs the non-strict curve test on `(g^T, ġ^T)`.
pub fn check_kernel_pmp_sufficient<S: Real>(
    sys: &StateSpace<S>,
    period: S,
    samples: usize,
    eps: S,
) -> Result<KernelSufficiency<S>> {
    if !(period > S::zero()) || !period.is_finite() {
        return Err(Error::InvalidArgument(format!("period must be positive, got {period}")));
    }
    if samples < 16 {
        return Err(Error::InvalidArgument(format!("need at least 16 samples, got {samples}")));
    }
    let a = sys.a();
    let n = sys.dim();
    let lhs = &Matrix::identity(n) - &expm(a, period)?;
    let z = Lu::from_matrix(&lhs)?.solve(sys.b());
    let az = a.mul_vec(&z);
    let h = period / S::from_usize_lossy(samples);
    let step = expm(a, h)?;
    let mut x = z.clone();
    let mut dx = az.clone();
    let mut g = Vec::with_capacity(samples);
    let mut dg = Vec::with_capacity(samples);
    for i in 0..samples {
        if i > 0 {
            if i % 64 == 0 {
                let e = expm(a, h * S::from_usize_lossy(i))?;
                x = e.mul_vec(&z);
                dx = e.mul_vec(&az);
            } else {
                x = step.mul_vec(&x);
                dx = step.mul_vec(&dx);
            }
        }
        g.push(dot(sys.c(), &x));
        dg.push(dot(sys.c(), &dx));
    }
    if g.iter().chain(&dg).all(|v| v.abs() <= eps) {
        return Err(Error::Degenerate("periodized impulse response samples are all zero".into()));
    }
    let u = SampledPeriodicSignal::new(period, g)?;
    let du = SampledPeriodicSignal::new(period, dg)?;
    let pass = kernel_pmp_test(&u, &du, false, KernelTestMode::Fast, eps)?;
    Ok(KernelSufficiency {
        period,
        samples,
        verdict: if pass { Verdict::Holds } else { Verdict::Inconclusive },
    })
}

/// Sign of `det([u; v] e^{At} [w x])`, evaluated as the scalar response
/// `(u∧v)ᵀ e^{A^{[2]} t} (w∧x)` on `[0, t_max]`; holds when nonnegative.
pub fn compound2_sign_certificate<S: Real>(
    a: &Matrix<S>,
    u: &[S],
    v: &[S],
    w: &[S],
    x: &[S],
    grid: &CheckGrid<S>,
    tol: Tolerances<S>,
) -> Result<ConditionResult<S>> {
    let n = a.rows();
    if n < 2 || !a.is_square() {
        return Err(Error::Dimension(format!(
            "second compound needs a square matrix of size at least 2, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if [u, v, w, x].iter().any(|z| z.len() != n) {
        return Err(Error::Dimension(format!("vectors must have length {n}")));
    }
    let alpha = spectral_abscissa(a)?;
    let (m, p, q) = compound_pair(a, u, v, w, x);
    let step = expm(&m, grid.spacing())?;
    let mut samples = Samples {
        origin: Some(dot(&p, &q)),
        interior: Vec::with_capacity(grid.points),
    };
    let mut state = q.clone();
    for i in 1..=grid.points {
        state = if i % 64 == 0 {
            expm(&m, grid.time(i))?.mul_vec(&q)
        } else {
            step.mul_vec(&state)
        };
        samples.interior.push((grid.time(i), dot(&p, &state)));
    }
    let horizon_ok = alpha < S::zero() && grid.t_max >= S::lit(HORIZON_DECAY_UNITS) / (-alpha / S::lit(2.0)) * (S::one() - S::lit(1e-12));
    let dec = Decision {
        grid,
        horizon_ok,
        eps: tol.eval_eps,
    };
    Ok(dec.decide("compound2_sign", &samples, tail_sign(&m, &p, &q)))
}
