use std::path::{Path, PathBuf};

use lti_pmp::certificates::{certify_pmp, check_positive_domination, required_horizon};
use lti_pmp::gain::{
    freq_response, gain_sweep, harmonic_dominance_check, octave_monotonicity_check, positive_domination_verify,
    GainPair,
};
use lti_pmp::linalg::log_grid;
use lti_pmp::signals::{max_pm_amplitude, AmplitudeSearch};
use lti_pmp::{AutocorrelationModel, ConditionResult64, MonotonicityReport64, PmpVerdict, Spacing, Verdict};

use crate::config::AnalysisConfig;
use crate::error::CliError;
use crate::report::{Report, Section};
use crate::specfile::{parse_system, Realization, SystemSpec};
use crate::sweep_csv::write_sweep_csv;
use crate::{EXIT_FAILED, EXIT_HOLDS, EXIT_INCONCLUSIVE, EXIT_INTERNAL};

/// At most this many witnesses are listed per check.
const MAX_WITNESSES: usize = 20;
/// Base frequencies for the harmonic dominance scan.
const HARMONIC_BASES: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: Report,
    pub exit_code: u8,
    /// Extra files `(name, contents)` to place next to the report.
    pub files: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaOptions {
    pub omega: f64,
    pub k: u32,
    pub tol: f64,
    pub samples: Option<usize>,
}

impl Default for LemmaOptions {
    fn default() -> Self {
        Self {
            omega: 1.0,
            k: 2,
            tol: 1e-4,
            samples: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Certify,
    VerifyGain,
    Posdom,
    LemmaInput(LemmaOptions),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Certify => "certify",
            Command::VerifyGain => "verify-gain",
            Command::Posdom => "posdom",
            Command::LemmaInput(_) => "lemma-input",
        }
    }
}

/// Loads the spec (when given) and runs one command.
pub fn run(command: &Command, spec: Option<&Path>, cfg: &AnalysisConfig) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let loaded = spec.map(|p| parse_system(p).map(|s| (p.to_path_buf(), s))).transpose()?;
    let need_spec = || CliError::Config(format!("`{}` needs --spec PATH", command.name()));
    match command {
        Command::Certify => {
            let (p, s) = loaded.ok_or_else(need_spec)?;
            certify(&s, &p, cfg)
        }
        Command::VerifyGain => {
            let (p, s) = loaded.ok_or_else(need_spec)?;
            verify_gain(&s, &p, cfg)
        }
        Command::Posdom => {
            let (p, s) = loaded.ok_or_else(need_spec)?;
            posdom(&s, &p, cfg)
        }
        Command::LemmaInput(opts) => lemma_input(opts, loaded.as_ref().map(|(p, s)| (s, p.as_path())), cfg),
    }
}

/// Writes `<command>-report.txt` and any extra files into `dir`.
pub fn write_outputs(dir: &Path, command: &Command, outcome: &Outcome) -> Result<Vec<PathBuf>, CliError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CliError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let mut written = Vec::new();
    let report_path = dir.join(format!("{}-report.txt", command.name()));
    std::fs::write(&report_path, outcome.report.render()).map_err(io(&report_path))?;
    written.push(report_path);
    for (name, contents) in &outcome.files {
        let path = dir.join(name);
        std::fs::write(&path, contents).map_err(io(&path))?;
        written.push(path);
    }
    Ok(written)
}

fn header(report: &mut Report, command: &str, spec: Option<(&SystemSpec, &Path)>) {
    let run = report.section("run");
    run.put("command", command).put("version", env!("CARGO_PKG_VERSION"));
    let Some((spec, path)) = spec else { return };
    run.put("spec", path.display());
    let sys = &spec.system;
    let s = report.section("system");
    s.put("label", spec.label.as_deref().unwrap_or(""))
        .put("realization", spec.realization.as_str());
    if let Realization::Companion { num, den } = &spec.realization {
        s.nums("num", num).nums("den", den);
    }
    s.put("n", sys.dim())
        .nums("A", sys.a().as_slice())
        .nums("b", sys.b())
        .nums("c", sys.c())
        .num("spectral_abscissa", sys.abscissa());
}

fn condition(report: &mut Report, c: &ConditionResult64) {
    let s = report.section(&format!("condition.{}", c.name));
    s.put("verdict", c.verdict.as_str())
        .num("min_margin", c.min_margin)
        .num("argmin_t", c.argmin_t)
        .put("boundary", c.boundary);
    if c.verdict == Verdict::Fails {
        s.num("witness_t", c.argmin_t);
    }
    if let Some((m, t)) = c.positivity {
        s.num("positivity_min_ratio", m).num("positivity_argmin_t", t);
    }
    s.put("tail", c.tail.map_or("not-analysed", |t| t.as_str()))
        .put("tail_note", &c.tail_note);
}

fn certify(spec: &SystemSpec, path: &Path, cfg: &AnalysisConfig) -> Result<Outcome, CliError> {
    let model = AutocorrelationModel::build_with(&spec.system, cfg.tolerances())?;
    let grid = cfg.grid(model.spectral())?;
    let cert = certify_pmp(&model, &grid)?;

    let mut report = Report::default();
    header(&mut report, "certify", Some((spec, path)));
    report.section("autocorrelation").num("r0", model.r0()).nums("gramian", model.gramian().as_slice());
    cfg.describe_grid(report.section("grid"), &grid, required_horizon(model.spectral()));
    for c in [&cert.logconv_der, &cert.convexity, &cert.logconcavity] {
        condition(&mut report, c);
    }
    let exit_code = match cert.verdict {
        PmpVerdict::CertifiedViaI | PmpVerdict::CertifiedViaII => EXIT_HOLDS,
        PmpVerdict::Failed => EXIT_FAILED,
        PmpVerdict::Inconclusive => EXIT_INCONCLUSIVE,
    };
    report
        .section("certificate")
        .put("verdict", cert.verdict.as_str())
        .put("exit_code", exit_code);
    Ok(Outcome {
        report,
        exit_code,
        files: Vec::new(),
    })
}

fn pair(s: &mut Section, p: &GainPair<f64>) {
    s.put("index", p.index)
        .num("omega_ref", p.omega_ref)
        .num("omega_cmp", p.omega_cmp)
        .num("mag_ref", p.mag_ref)
        .num("mag_cmp", p.mag_cmp)
        .num("slack", p.slack);
}

fn witnesses<'a>(report: &mut Report, prefix: &str, pairs: impl Iterator<Item = &'a GainPair<f64>>) {
    for (i, p) in pairs.take(MAX_WITNESSES).enumerate() {
        pair(report.section(&format!("witness.{prefix}.{i}")), p);
    }
}

fn gain_verdict(holds: bool) -> &'static str {
    if holds {
        "holds"
    } else {
        "violated"
    }
}

fn verify_gain(spec: &SystemSpec, path: &Path, cfg: &AnalysisConfig) -> Result<Outcome, CliError> {
    let sys = &spec.system;
    let range = cfg.sweep(sys)?;
    let eps = cfg.eps();
    let k_max = cfg.k_max();
    let sweep = gain_sweep(sys, range.lo, range.hi, range.points, Spacing::Log)?;

    // bases chosen so that every harmonic stays inside the sweep range
    let top = range.hi / k_max as f64;
    let bases = if top > range.lo {
        log_grid(range.lo, top, HARMONIC_BASES)
    } else {
        vec![range.lo]
    };
    let harmonic: Vec<MonotonicityReport64> = bases
        .iter()
        .map(|&w| harmonic_dominance_check(sys, w, k_max, eps))
        .collect::<Result<_, _>>()?;
    let octaves = ((range.hi / range.lo).log2().floor() as i32).max(1);
    let octave = octave_monotonicity_check(sys, range.lo, 0, octaves, eps)?;

    let harmonic_ok = harmonic.iter().all(|r| r.holds());
    let holds = harmonic_ok && octave.holds();
    let exit_code = if holds { EXIT_HOLDS } else { EXIT_FAILED };

    let mut report = Report::default();
    header(&mut report, "verify-gain", Some((spec, path)));
    let (peak_i, peak) = sweep
        .magnitudes
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |a, (i, m)| if m > a.1 { (i, m) } else { a });
    let s = report.section("sweep");
    range.describe(s);
    s.num("dc_magnitude", freq_response(sys, 0.0)?.norm())
        .num("peak_omega", sweep.frequencies[peak_i])
        .num("peak_magnitude", peak)
        .put("ill_conditioned", sweep.ill_conditioned)
        .put("csv", "verify-gain-sweep.csv");

    let min_rel = harmonic
        .iter()
        .flat_map(|r| r.pairs.iter())
        .filter(|p| p.index >= 2)
        .map(|p| p.slack / p.mag_ref.max(f64::MIN_POSITIVE))
        .fold(f64::INFINITY, f64::min);
    let violations: Vec<&GainPair<f64>> = harmonic.iter().flat_map(|r| r.witnesses.iter()).collect();
    report
        .section("harmonic_dominance")
        .num("base_lo", bases[0])
        .num("base_hi", bases[bases.len() - 1])
        .put("bases", bases.len())
        .put("k_max", k_max)
        .num("eps", eps)
        .put("verdict", gain_verdict(harmonic_ok))
        .put("violations", violations.len())
        .num("min_relative_slack", min_rel);
    witnesses(&mut report, "harmonic", violations.into_iter());

    report
        .section("octave")
        .num("base_omega", range.lo)
        .put("k_lo", 0)
        .put("k_hi", octaves)
        .put("verdict", octave.verdict.as_str())
        .put("violations", octave.witnesses.len())
        .num("min_slack", octave.min_slack());
    witnesses(&mut report, "octave", octave.witnesses.iter());

    report
        .section("summary")
        .put("verdict", gain_verdict(holds))
        .put("exit_code", exit_code);
    Ok(Outcome {
        report,
        exit_code,
        files: vec![("verify-gain-sweep.csv".into(), write_sweep_csv(&sweep))],
    })
}

fn posdom(spec: &SystemSpec, path: &Path, cfg: &AnalysisConfig) -> Result<Outcome, CliError> {
    let sys = &spec.system;
    let model = AutocorrelationModel::build_with(sys, cfg.tolerances())?;
    let grid = cfg.grid(model.spectral())?;
    let cert = check_positive_domination(sys, &grid, cfg.tolerances())?;
    let range = cfg.sweep(sys)?;
    let omegas = log_grid(range.lo, range.hi, range.points);
    let check = positive_domination_verify(sys, &omegas, cfg.eps())?;

    let (exit_code, status) = posdom_status(cert.verdict, check.holds());

    let mut report = Report::default();
    header(&mut report, "posdom", Some((spec, path)));
    cfg.describe_grid(report.section("grid"), &grid, required_horizon(model.spectral()));
    condition(&mut report, &cert);
    let (arg, max) = check
        .pairs
        .iter()
        .fold((0.0, f64::NEG_INFINITY), |a, p| if p.mag_cmp > a.1 { (p.omega_cmp, p.mag_cmp) } else { a });
    let s = report.section("sweep_check");
    range.describe(s);
    s.num("dc_magnitude", check.pairs[0].mag_ref)
        .num("max_magnitude", max)
        .num("argmax_omega", arg)
        .put("verdict", check.verdict.as_str())
        .put("violations", check.witnesses.len());
    witnesses(&mut report, "sweep", check.witnesses.iter());
    report
        .section("summary")
        .put("status", status)
        .put("exit_code", exit_code);
    Ok(Outcome {
        report,
        exit_code,
        files: Vec::new(),
    })
}

/// A certificate that holds while the sweep finds a larger gain than at DC
/// contradicts the theory and is reported as an internal error.
pub fn posdom_status(certificate: Verdict, sweep_holds: bool) -> (u8, &'static str) {
    match (certificate, sweep_holds) {
        (Verdict::Holds, true) => (EXIT_HOLDS, "positively-dominated"),
        (Verdict::Holds, false) => (EXIT_INTERNAL, "internal-inconsistency"),
        (Verdict::Fails, _) => (EXIT_FAILED, "certificate-failed"),
        (Verdict::Inconclusive, _) => (EXIT_INCONCLUSIVE, "inconclusive"),
    }
}

fn lemma_input(opts: &LemmaOptions, spec: Option<(&SystemSpec, &Path)>, cfg: &AnalysisConfig) -> Result<Outcome, CliError> {
    if !(opts.omega > 0.0 && opts.omega.is_finite()) {
        return Err(CliError::Config(format!("--omega must be positive, got {}", opts.omega)));
    }
    if opts.k < 2 {
        return Err(CliError::Config(format!("--k must be at least 2, got {}", opts.k)));
    }
    if !(opts.tol > 0.0 && opts.tol.is_finite()) {
        return Err(CliError::Config(format!("--tol must be positive, got {}", opts.tol)));
    }
    let mut search = AmplitudeSearch::defaults(opts.k, cfg.eps());
    search.tol = opts.tol;
    if let Some(n) = opts.samples {
        search.samples = n;
    }

    let mut report = Report::default();
    header(&mut report, "lemma-input", spec);
    let s = report.section("search");
    s.num("omega", opts.omega)
        .put("k", opts.k)
        .num("period", std::f64::consts::TAU / opts.omega)
        .put("samples", search.samples)
        .num("tol", search.tol)
        .num("eps", search.eps)
        .put("test", "strict curve test on (u, du) scaled to unit peak");
    let a_bar = match max_pm_amplitude(opts.omega, opts.k, &search) {
        Ok(a) => a,
        Err(e @ lti_pmp::Error::Bracketing(_)) => {
            s.put("status", "bracketing-failure").put("diagnostic", e);
            report.section("summary").put("exit_code", EXIT_INCONCLUSIVE);
            return Ok(Outcome {
                report,
                exit_code: EXIT_INCONCLUSIVE,
                files: Vec::new(),
            });
        }
        Err(lti_pmp::Error::InvalidArgument(m)) => return Err(CliError::Config(m)),
        Err(e) => return Err(e.into()),
    };
    s.put("status", "ok").num("a_bar", a_bar);

    let mut exit_code = EXIT_HOLDS;
    if let Some((spec, _)) = spec {
        let sys = &spec.system;
        let model = AutocorrelationModel::build_with(sys, cfg.tolerances())?;
        let cert = certify_pmp(&model, &cfg.grid(model.spectral())?)?;
        let g1 = freq_response(sys, opts.omega)?.norm_sqr();
        let gk = freq_response(sys, opts.k as f64 * opts.omega)?.norm_sqr();
        let ratio = gk / g1;
        let b = a_bar * ratio;
        let holds = b <= a_bar;
        if !holds {
            exit_code = EXIT_FAILED;
        }
        report
            .section("ratio_test")
            .put("certificate_verdict", cert.verdict.as_str())
            .num("gain_sq_omega", g1)
            .num("gain_sq_k_omega", gk)
            .num("ratio", ratio)
            .num("b", b)
            .put("b_le_a_bar", holds);
    }
    report.section("summary").put("exit_code", exit_code);
    Ok(Outcome {
        report,
        exit_code,
        files: Vec::new(),
    })
}
