mod common;

use common::*;
use lti_pmp::certificates::{certify_pmp, check_convexity, check_positive_domination, logconcavity_margin, logconv_margin};
use lti_pmp::gain::{freq_response, harmonic_dominance_check, positive_domination_verify};
use lti_pmp::linalg::compound::{additive_compound2, multiplicative_compound2, wedge};
use lti_pmp::linalg::matrix::dot;
use lti_pmp::linalg::{eigenvalues, expm, log_grid, lyapunov_residual, solve_lyapunov};
use lti_pmp::signals::{
    cyclic_variation, is_periodically_monotone, kernel_pmp_test, max_pm_amplitude, pm_gamma_sweep_oracle,
    AmplitudeSearch,
};
use lti_pmp::{
    AutocorrelationModel, CheckGrid, KernelTestMode, Matrix, PeriodizedModel, SampledPeriodicSignal, SpectralInfo,
    StateSpace, Verdict,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const EPS: f64 = 1e-8;

fn stable(seed: u64, max_order: usize) -> StateSpace<f64> {
    random_stable(&mut ChaCha8Rng::seed_from_u64(seed), max_order)
}

fn lags(seed: u64) -> StateSpace<f64> {
    random_lags(&mut ChaCha8Rng::seed_from_u64(seed))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

/// Strict cyclic variation by trying every ±1 completion of the zeros.
fn strict_by_completion(v: &[i8]) -> i64 {
    let zeros: Vec<usize> = (0..v.len()).filter(|&i| v[i] == 0).collect();
    let mut best = 0;
    for mask in 0..(1u32 << zeros.len()) {
        let mut w = v.to_vec();
        for (bit, &i) in zeros.iter().enumerate() {
            w[i] = if mask >> bit & 1 == 1 { 1 } else { -1 };
        }
        let n = w.len();
        best = best.max((0..n).filter(|&i| w[i] != w[(i + 1) % n]).count() as i64);
    }
    best
}

fn signal(v: Vec<f64>) -> SampledPeriodicSignal<f64> {
    SampledPeriodicSignal::new(1.0, v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lyapunov_solution_is_symmetric_psd_with_small_residual(seed in any::<u64>()) {
        let sys = stable(seed, 6);
        let p = solve_lyapunov(sys.a(), sys.b()).unwrap();
        let bb: f64 = sys.b().iter().map(|x| x * x).sum();
        prop_assert!(lyapunov_residual(sys.a(), &p, sys.b()) <= 1e-10 * bb.max(1.0));
        let n = sys.dim();
        for i in 0..n {
            for j in 0..n {
                prop_assert!((p[(i, j)] - p[(j, i)]).abs() <= 1e-14 * p.max_abs());
            }
        }
        for z in eigenvalues(&p).unwrap() {
            prop_assert!(z.re >= -1e-10 * p.max_abs());
        }
    }

    #[test]
    fn expm_group_law(seed in any::<u64>(), s in 0.0f64..3.0, t in 0.0f64..3.0) {
        let a = stable(seed, 5).a().clone();
        let lhs = expm(&a, s + t).unwrap();
        let rhs = &expm(&a, s).unwrap() * &expm(&a, t).unwrap();
        let scale = lhs.max_abs().max(1e-3);
        prop_assert!((&lhs - &rhs).max_abs() <= 1e-10 * scale);
    }

    #[test]
    fn frequency_response_is_conjugate_symmetric(seed in any::<u64>(), w in 1e-3f64..1e3) {
        let sys = stable(seed, 5);
        let g = freq_response(&sys, w).unwrap();
        let h = freq_response(&sys, -w).unwrap();
        prop_assert!((g - h.conj()).norm() <= 1e-12 * g.norm().max(1e-12));
    }

    #[test]
    fn decay_envelope_bounds_the_exponential(seed in any::<u64>(), x in 0.0f64..1.0) {
        let sys = stable(seed, 5);
        let info = SpectralInfo::of(&sys).unwrap();
        let t = x * 60.0 / info.decay_sigma;
        prop_assert!(expm(sys.a(), t).unwrap().norm_fro() <= info.envelope(t) * (1.0 + 1e-9));
    }

    #[test]
    fn autocorrelation_is_even_and_starts_at_cpc(seed in any::<u64>(), t in 0.0f64..8.0) {
        let sys = stable(seed, 5);
        let model = AutocorrelationModel::build(&sys).unwrap();
        let r0 = dot(sys.c(), &model.gramian().mul_vec(sys.c()));
        prop_assert!(rel(model.r0(), r0) <= 1e-14);
        prop_assert!(rel(model.deriv(0, 0.0).unwrap(), r0) <= 1e-14);
        prop_assert_eq!(model.deriv(0, -t).unwrap(), model.deriv(0, t).unwrap());
        prop_assert!(model.deriv(0, t).unwrap().abs() <= model.r0() * (1.0 + 1e-12));
    }

    #[test]
    fn periodization_tends_to_the_aperiodic_kernel(seed in any::<u64>(), t in 0.0f64..5.0) {
        let sys = stable(seed, 4);
        let model = AutocorrelationModel::build(&sys).unwrap();
        let period = 40.0 / model.spectral().decay_sigma;
        let pm = PeriodizedModel::build(&model, period).unwrap();
        for m in 0..=3 {
            prop_assert!((pm.eval(m, t).unwrap() - model.deriv(m, t).unwrap()).abs() <= 1e-6);
        }
    }

    #[test]
    fn compound_response_matches_explicit_determinants(seed in any::<u64>(), t in 0.0f64..6.0) {
        let sys = stable(seed, 5);
        prop_assume!(sys.dim() >= 2);
        let model = AutocorrelationModel::build(&sys).unwrap();
        let a = sys.a();
        let (c, ca, ca2) = (model.c_power(0), model.c_power(1), model.c_power(2));
        let pc = model.gramian_c().to_vec();
        let apc = a.mul_vec(&pc);
        let e2 = expm(&additive_compound2(a), t).unwrap();
        let w = wedge(&pc, &apc);
        // Ṙ² - R R̈ and R̈² - Ṙ R⃛ as negated compound responses
        let lk = dot(&wedge(c, ca), &e2.mul_vec(&w));
        let lc = dot(&wedge(ca, ca2), &e2.mul_vec(&w));
        let d = model.derivs(t).unwrap();
        let scale = model.r0() * model.r0() * (1.0 + a.max_abs()).powi(4);
        prop_assert!((logconv_margin(&model, t).unwrap() + lc).abs() <= 1e-9 * scale);
        prop_assert!((logconcavity_margin(&model, t).unwrap() + lk).abs() <= 1e-9 * scale);
        prop_assert!((d[1] * d[1] - d[0] * d[2] + lk).abs() <= 1e-9 * scale);
        prop_assert!((d[2] * d[2] - d[1] * d[3] + lc).abs() <= 1e-9 * scale);
        // multiplicative compound of e^{At} against e^{A^{[2]} t}
        let m2 = multiplicative_compound2(&expm(a, t).unwrap());
        prop_assert!((&m2 - &e2).max_abs() <= 1e-9 * e2.max_abs().max(1.0));
    }

    #[test]
    fn refining_the_grid_never_clears_a_violation(seed in any::<u64>()) {
        let sys = stable(seed, 4);
        let model = AutocorrelationModel::build(&sys).unwrap();
        let coarse = CheckGrid::default_for(model.spectral()).with_points(512);
        let fine = coarse.with_points(1024);
        let a = check_convexity(&model, &coarse).unwrap();
        let b = check_convexity(&model, &fine).unwrap();
        // an origin-only violation gives way to an interior witness once one exists
        if a.argmin_t > 0.0 {
            prop_assert!(b.min_margin <= a.min_margin + 1e-12 * model.r0());
        }
        if a.verdict == Verdict::Fails {
            prop_assert_eq!(b.verdict, Verdict::Fails);
        }
    }

    #[test]
    fn output_scaling_preserves_every_verdict(seed in any::<u64>(), k in 0.01f64..100.0, w in 0.01f64..10.0) {
        let sys = stable(seed, 4);
        let scaled = sys.with_scaled_output(k).unwrap();
        let (m1, m2) = (AutocorrelationModel::build(&sys).unwrap(), AutocorrelationModel::build(&scaled).unwrap());
        let grid = CheckGrid::default_for(m1.spectral());
        let (c1, c2) = (certify_pmp(&m1, &grid).unwrap(), certify_pmp(&m2, &grid).unwrap());
        prop_assert_eq!(c1.verdict, c2.verdict);
        let h1 = harmonic_dominance_check(&sys, w, 8, EPS).unwrap();
        let h2 = harmonic_dominance_check(&scaled, w, 8, EPS).unwrap();
        prop_assert_eq!(h1.verdict, h2.verdict);
        let g1 = freq_response(&sys, w).unwrap().norm();
        let g2 = freq_response(&scaled, w).unwrap().norm();
        prop_assert!(rel(g2, k * g1) <= 1e-12);
    }

    #[test]
    fn certified_lags_pass_the_ratio_test(seed in any::<u64>(), w in 0.01f64..10.0) {
        let sys = lags(seed);
        let model = AutocorrelationModel::build(&sys).unwrap();
        let cert = certify_pmp(&model, &CheckGrid::default_for(model.spectral())).unwrap();
        prop_assume!(cert.verdict.is_certified());
        for k in 2..=8u32 {
            let ratio = freq_response(&sys, k as f64 * w).unwrap().norm_sqr() / freq_response(&sys, w).unwrap().norm_sqr();
            prop_assert!(ratio <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn positive_domination_certificate_implies_dc_peak(seed in any::<u64>()) {
        let sys = stable(seed, 4);
        let model = AutocorrelationModel::build(&sys).unwrap();
        let grid = CheckGrid::default_for(model.spectral());
        let cert = check_positive_domination(&sys, &grid, Default::default()).unwrap();
        prop_assume!(cert.verdict == Verdict::Holds);
        let slow = -sys.abscissa();
        let rep = positive_domination_verify(&sys, &log_grid(1e-3 * slow, 1e3 * slow, 2000), EPS).unwrap();
        prop_assert!(rep.holds());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn variation_invariances(v in prop::collection::vec(-2i8..=2, 1..14), r in 0usize..14) {
        let x: Vec<f64> = v.iter().map(|&s| s as f64).collect();
        let neg: Vec<f64> = x.iter().map(|s| -s).collect();
        let mut rot = x.clone();
        rot.rotate_left(r % x.len());
        for strict in [false, true] {
            let base = cyclic_variation(&x, strict, EPS).value;
            prop_assert_eq!(cyclic_variation(&neg, strict, EPS).value, base);
            prop_assert_eq!(cyclic_variation(&rot, strict, EPS).value, base);
            prop_assert!(base % 2 == 0 || base == -1);
        }
        let weak = cyclic_variation(&x, false, EPS).value;
        let strict = cyclic_variation(&x, true, EPS).value;
        prop_assert!(strict >= weak);
        let signs: Vec<i8> = v.iter().map(|s| s.signum()).collect();
        prop_assert_eq!(strict, strict_by_completion(&signs));
    }

    #[test]
    fn fast_and_brute_curve_tests_agree(
        pts in prop::collection::vec((-3i32..=3, -3i32..=3), 4..24),
        strict in any::<bool>(),
    ) {
        // small integer lattices exercise collinear runs and repeated points
        let (x, y): (Vec<f64>, Vec<f64>) = pts.iter().map(|&(a, b)| (a as f64, b as f64)).unzip();
        let (u, du) = (signal(x), signal(y));
        let fast = kernel_pmp_test(&u, &du, strict, KernelTestMode::Fast, EPS).unwrap();
        let brute = kernel_pmp_test(&u, &du, strict, KernelTestMode::Brute, EPS).unwrap();
        prop_assert_eq!(fast, brute);
    }

    #[test]
    fn periodic_monotonicity_matches_level_sweep(v in prop::collection::vec(-4i32..=4, 4..32), strict in any::<bool>()) {
        let s = signal(v.iter().map(|&x| x as f64).collect());
        prop_assert_eq!(is_periodically_monotone(&s, strict, EPS), pm_gamma_sweep_oracle(&s, strict, EPS));
    }

    #[test]
    fn smooth_periodic_signals_match_level_sweep(
        coeffs in prop::collection::vec(-1.0f64..1.0, 4),
        n in 8usize..64,
        strict in any::<bool>(),
    ) {
        let s = SampledPeriodicSignal::from_fn(1.0, n, |t: f64| {
            let w = std::f64::consts::TAU * t;
            coeffs[0] * w.sin() + coeffs[1] * w.cos() + coeffs[2] * (2.0 * w).sin() + coeffs[3] * (3.0 * w).cos()
        })
        .unwrap();
        prop_assert_eq!(is_periodically_monotone(&s, strict, EPS), pm_gamma_sweep_oracle(&s, strict, EPS));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn amplitude_search_is_frequency_invariant(w in 0.1f64..10.0, k in 2u32..=3) {
        let cfg = AmplitudeSearch::defaults(k, EPS);
        let a1 = max_pm_amplitude(1.0, k, &cfg).unwrap();
        let aw = max_pm_amplitude(w, k, &cfg).unwrap();
        prop_assert!(a1 > 0.0);
        prop_assert!((a1 - aw).abs() <= 2.0 * cfg.tol);
    }
}

#[test]
fn single_precision_repeated_pole() {
    let sys = StateSpace::<f32>::new(
        Matrix::from_rows(&[&[-1.0, 1.0], &[0.0, -1.0]]).unwrap(),
        vec![0.0, 1.0],
        vec![1.0, 0.0],
    )
    .unwrap();
    let model = AutocorrelationModel::build(&sys).unwrap();
    assert!((model.r0() - 0.25).abs() < 1e-6);
    assert!((model.deriv(0, 1.0).unwrap() - 0.5 * (-1.0f32).exp()).abs() < 1e-6);
    let cert = certify_pmp(&model, &CheckGrid::default_for(model.spectral())).unwrap();
    assert!(cert.verdict.is_certified(), "{:?}", cert.verdict);
}
