//! `omega,re,im,magnitude` sweep files.

use std::fmt::Write as _;

use lti_pmp::GainSweep64;

use crate::error::CliError;

pub const HEADER: &str = "omega,re,im,magnitude";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub omega: f64,
    pub re: f64,
    pub im: f64,
    pub magnitude: f64,
}

pub fn write_sweep_csv(sweep: &GainSweep64) -> String {
    let mut out = format!("{HEADER}\n");
    for ((w, g), m) in sweep.frequencies.iter().zip(&sweep.responses).zip(&sweep.magnitudes) {
        let _ = writeln!(out, "{w:.15e},{:.15e},{:.15e},{m:.15e}", g.re, g.im);
    }
    out
}

pub fn read_sweep_csv(text: &str) -> Result<Vec<SweepRow>, CliError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == HEADER => {}
        _ => return Err(CliError::parse(1, "header", format!("expected `{HEADER}`"))),
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let vals: Vec<f64> = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::parse(idx + 1, "row", e.to_string()))?;
        let [omega, re, im, magnitude] = vals[..] else {
            return Err(CliError::parse(idx + 1, "row", format!("expected 4 fields, got {}", vals.len())));
        };
        rows.push(SweepRow { omega, re, im, magnitude });
    }
    Ok(rows)
}
