use std::path::{Path, PathBuf};
use std::process::Command as Process;

use lti_pmp_cli::{
    parse_system, read_sweep_csv, run, write_outputs, AnalysisConfig, Command, LemmaOptions, Report, EXIT_FAILED,
    EXIT_HOLDS, EXIT_INCONCLUSIVE, EXIT_IO,
};
use tempfile::TempDir;

const LAG: &str = "label = first-order lag\n[transfer-function]\nnum = 1\nden = 1 1\n";
const DOUBLE_LAG: &str = "# 1/(s+1)^2\n[transfer-function]\nnum = 1\nden = 1 2 1\n";
const RESONANT: &str = "label = resonant\n[state-space]\nn = 2\nA = 0 1\n    -1 -0.2  # continues row-major\nb = 0 1\nc = 1 0\n";
const UNSTABLE: &str = "[transfer-function]\nnum = 1\nden = 1 -1\n";

fn spec(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn bin(args: &[&str]) -> (i32, String, String) {
    let out = Process::new(env!("CARGO_BIN_EXE_lti-pmp")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn num(report: &Report, section: &str, key: &str) -> f64 {
    report.get(section, key).unwrap().parse().unwrap()
}

#[test]
fn certify_exit_codes() {
    let dir = TempDir::new().unwrap();
    let cfg = AnalysisConfig::default();

    let out = run(&Command::Certify, Some(&spec(&dir, "dl.sys", DOUBLE_LAG)), &cfg).unwrap();
    assert_eq!(out.exit_code, EXIT_HOLDS);
    assert_eq!(out.report.get("certificate", "verdict"), Some("certified-via-ii"));
    assert_eq!(out.report.get("condition.convexity", "verdict"), Some("fails"));

    let out = run(&Command::Certify, Some(&spec(&dir, "res.sys", RESONANT)), &cfg).unwrap();
    assert_eq!(out.exit_code, EXIT_FAILED);
    assert_eq!(out.report.get("certificate", "verdict"), Some("failed"));
    let t = num(&out.report, "condition.convexity", "witness_t");
    assert!(t > 0.0);

    let err = run(&Command::Certify, Some(Path::new("/nonexistent/spec.sys")), &cfg).unwrap_err();
    assert_eq!(err.exit_code(), EXIT_IO);
}

#[test]
fn short_horizon_is_inconclusive() {
    let dir = TempDir::new().unwrap();
    let cfg = AnalysisConfig {
        t_max: Some(5.0),
        ..Default::default()
    };
    let out = run(&Command::Certify, Some(&spec(&dir, "lag.sys", LAG)), &cfg).unwrap();
    assert_eq!(out.exit_code, EXIT_INCONCLUSIVE);
    assert_eq!(out.report.get("grid", "t_max_source"), Some("override"));
}

#[test]
fn binary_exit_codes_and_messages() {
    let dir = TempDir::new().unwrap();
    let dl = spec(&dir, "dl.sys", DOUBLE_LAG);
    let res = spec(&dir, "res.sys", RESONANT);
    let bad = spec(&dir, "bad.sys", UNSTABLE);

    let (code, stdout, _) = bin(&["certify", "--spec", dl.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.contains("verdict = certified-via-ii"));

    let (code, stdout, _) = bin(&["certify", "--spec", res.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(stdout.contains("witness_t = "));

    let (code, _, stderr) = bin(&["certify", "--spec", bad.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert!(stderr.contains("offending eigenvalues: 1"), "{stderr}");

    let (code, _, _) = bin(&["posdom", "--spec", dir.path().join("missing.sys").to_str().unwrap()]);
    assert_eq!(code, 3);
    let (code, _, _) = bin(&["posdom"]);
    assert_eq!(code, 3);
    let (code, _, _) = bin(&["certify", "--no-such-flag"]);
    assert_eq!(code, 3);
    let (code, _, _) = bin(&["certify", "--spec", dl.to_str().unwrap(), "--t-max", "-1"]);
    assert_eq!(code, 3);
    let (code, stdout, _) = bin(&["--help"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("verify-gain"));
}

#[test]
fn verify_gain_writes_a_sweep() {
    let dir = TempDir::new().unwrap();
    let out_dir = dir.path().join("out");
    let lag = spec(&dir, "lag.sys", LAG);
    let (code, _, _) = bin(&["verify-gain", "--spec", lag.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code, 0);

    let report = Report::parse(&std::fs::read_to_string(out_dir.join("verify-gain-report.txt")).unwrap()).unwrap();
    assert_eq!(report.get("summary", "verdict"), Some("holds"));
    assert_eq!(report.get("sweep", "source"), Some("default"));
    let rows = read_sweep_csv(&std::fs::read_to_string(out_dir.join("verify-gain-sweep.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 2001);
    assert!(rows.windows(2).all(|w| w[1].omega > w[0].omega));
    let at_one = rows.iter().find(|r| r.omega == 1.0).expect("row at omega = 1");
    assert!((at_one.magnitude - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14);
}

#[test]
fn verify_gain_flags_the_resonance() {
    let dir = TempDir::new().unwrap();
    let cfg = AnalysisConfig {
        sweep_lo: Some(0.1),
        sweep_hi: Some(10.0),
        sweep_points: Some(101),
        k_max: Some(4),
        ..Default::default()
    };
    let out = run(&Command::VerifyGain, Some(&spec(&dir, "res.sys", RESONANT)), &cfg).unwrap();
    assert_eq!(out.exit_code, EXIT_FAILED);
    assert_eq!(out.report.get("sweep", "source"), Some("override"));
    assert_eq!(out.report.get("octave", "verdict"), Some("violated"));
    assert!(out.report.find("witness.harmonic.0").is_some());
    assert!(out.report.find("witness.octave.0").is_some());
    assert!((num(&out.report, "sweep", "peak_magnitude") - 5.0).abs() < 0.1);

    let bad = AnalysisConfig {
        sweep_lo: Some(10.0),
        sweep_hi: Some(1.0),
        ..Default::default()
    };
    assert_eq!(
        run(&Command::VerifyGain, Some(&spec(&dir, "r2.sys", RESONANT)), &bad)
            .unwrap_err()
            .exit_code(),
        EXIT_IO
    );
}

#[test]
fn posdom_outcomes() {
    let dir = TempDir::new().unwrap();
    let cfg = AnalysisConfig::default();
    let out = run(&Command::Posdom, Some(&spec(&dir, "lag.sys", LAG)), &cfg).unwrap();
    assert_eq!(out.exit_code, EXIT_HOLDS);
    assert_eq!(out.report.get("summary", "status"), Some("positively-dominated"));
    let out = run(&Command::Posdom, Some(&spec(&dir, "res.sys", RESONANT)), &cfg).unwrap();
    assert_eq!(out.exit_code, EXIT_FAILED);
    assert_eq!(out.report.get("sweep_check", "verdict"), Some("violated"));
}

#[test]
fn lemma_input_amplitude_and_ratio() {
    let dir = TempDir::new().unwrap();
    let cfg = AnalysisConfig::default();
    let at = |omega: f64, spec: Option<&Path>| {
        run(
            &Command::LemmaInput(LemmaOptions {
                omega,
                ..Default::default()
            }),
            spec,
            &cfg,
        )
        .unwrap()
    };
    let one = at(1.0, None);
    let five = at(5.0, None);
    let (a1, a5) = (num(&one.report, "search", "a_bar"), num(&five.report, "search", "a_bar"));
    assert!(a1 > 0.0);
    assert!((a1 - a5).abs() <= 1e-4);
    assert_eq!(one.exit_code, EXIT_HOLDS);

    let lag = spec(&dir, "lag.sys", LAG);
    let out = at(1.0, Some(&lag));
    assert_eq!(out.exit_code, EXIT_HOLDS);
    assert_eq!(out.report.get("ratio_test", "certificate_verdict"), Some("certified-via-i"));
    assert!((num(&out.report, "ratio_test", "ratio") - 0.4).abs() < 1e-12);
    assert!(num(&out.report, "ratio_test", "b") <= a1);
    assert_eq!(out.report.get("ratio_test", "b_le_a_bar"), Some("true"));

    let res = spec(&dir, "res.sys", RESONANT);
    let out = at(0.5, Some(&res));
    assert_eq!(out.exit_code, EXIT_FAILED);
}

#[test]
fn reports_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let res = spec(&dir, "res.sys", RESONANT);
    for cmd in ["certify", "verify-gain", "posdom"] {
        let a = dir.path().join(format!("{cmd}-a"));
        let b = dir.path().join(format!("{cmd}-b"));
        let (c1, s1, _) = bin(&[cmd, "--spec", res.to_str().unwrap(), "--out", a.to_str().unwrap()]);
        let (c2, s2, _) = bin(&[cmd, "--spec", res.to_str().unwrap(), "--out", b.to_str().unwrap()]);
        assert_eq!((c1, &s1), (c2, &s2));
        for entry in std::fs::read_dir(&a).unwrap() {
            let name = entry.unwrap().file_name();
            assert_eq!(std::fs::read(a.join(&name)).unwrap(), std::fs::read(b.join(&name)).unwrap());
        }
    }
}

#[test]
fn report_round_trips_the_system() {
    let dir = TempDir::new().unwrap();
    let text = "[state-space]\nn = 3\nA = -1.2345678901234567 0.1 0; 0.3333333333333333 -2 1e-7; 0 0 -0.7071067811865476\nb = 1 0.1234567890123456 -3\nc = 0.2 0 1e-300\n";
    let path = spec(&dir, "s.sys", text);
    let sys = parse_system(&path).unwrap().system;
    let out = run(&Command::Certify, Some(&path), &AnalysisConfig::default()).unwrap();
    let written = write_outputs(&dir.path().join("o"), &Command::Certify, &out).unwrap();
    let report = Report::parse(&std::fs::read_to_string(&written[0]).unwrap()).unwrap();
    let back = |key: &str| -> Vec<f64> {
        report
            .get("system", key)
            .unwrap()
            .split_whitespace()
            .map(|x| x.parse().unwrap())
            .collect()
    };
    assert_eq!(back("A"), sys.a().as_slice());
    assert_eq!(back("b"), sys.b());
    assert_eq!(back("c"), sys.c());
}
