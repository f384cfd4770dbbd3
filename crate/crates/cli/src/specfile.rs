//! System description files.
//!
//! ```text
//! # comments run to the end of the line
//! label = double lag
//! [transfer-function]
//! num = 1
//! den = 1 2 1
//! ```
//!
//! or a `[state-space]` block with `n`, `A` (row-major), `b` and `c`. Numbers
//! are separated by whitespace, commas or semicolons; surrounding brackets are
//! ignored. An indented line without `=` continues the previous field, so a
//! matrix can be written one row per line.

use std::path::Path;

use lti_pmp::{Matrix64, StateSpace64};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Realization {
    StateSpace,
    /// Controllable companion form of `num / den` (descending coefficients).
    Companion { num: Vec<f64>, den: Vec<f64> },
}

impl Realization {
    pub fn as_str(&self) -> &'static str {
        match self {
            Realization::StateSpace => "state-space",
            Realization::Companion { .. } => "companion",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    pub label: Option<String>,
    pub realization: Realization,
    pub system: StateSpace64,
}

pub fn parse_system(path: &Path) -> Result<SystemSpec, CliError> {
    let bytes = std::fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let text = String::from_utf8(bytes).map_err(|e| CliError::parse(0, "file", format!("not UTF-8: {e}")))?;
    parse_system_str(&text)
}

#[derive(Clone, Copy, PartialEq)]
enum Block {
    None,
    StateSpace,
    TransferFunction,
}

struct Field {
    line: usize,
    value: String,
}

pub fn parse_system_str(text: &str) -> Result<SystemSpec, CliError> {
    let mut block = Block::None;
    let mut block_line = 0;
    let mut label: Option<Field> = None;
    let mut fields: Vec<(String, Field)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            if block != Block::None {
                return Err(CliError::parse(line, name.trim(), "only one system block is allowed"));
            }
            block = match name.trim() {
                "state-space" => Block::StateSpace,
                "transfer-function" => Block::TransferFunction,
                other => {
                    return Err(CliError::parse(
                        line,
                        other,
                        "unknown section; expected [state-space] or [transfer-function]",
                    ))
                }
            };
            block_line = line;
            continue;
        }
        let indented = raw.starts_with(char::is_whitespace);
        if indented && !content.contains('=') {
            if let Some((_, prev)) = fields.last_mut() {
                prev.value.push(' ');
                prev.value.push_str(content);
                continue;
            }
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(CliError::parse(line, content, "expected `key = value`"));
        };
        let key = key.trim().to_string();
        let field = Field {
            line,
            value: value.trim().to_string(),
        };
        if key == "label" {
            if label.is_some() {
                return Err(CliError::parse(line, key, "duplicate field"));
            }
            label = Some(field);
            continue;
        }
        let allowed: &[&str] = match block {
            Block::None => &[],
            Block::StateSpace => &["n", "A", "b", "c"],
            Block::TransferFunction => &["num", "den"],
        };
        if !allowed.contains(&key.as_str()) {
            let msg = if block == Block::None {
                "field outside a system block".to_string()
            } else {
                format!("unknown field; expected one of {}", allowed.join(", "))
            };
            return Err(CliError::parse(line, key, msg));
        }
        if fields.iter().any(|(k, _)| *k == key) {
            return Err(CliError::parse(line, key, "duplicate field"));
        }
        fields.push((key, field));
    }

    let get = |key: &str| -> Result<&Field, CliError> {
        fields
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, f)| f)
            .ok_or_else(|| CliError::parse(block_line, key, "missing field"))
    };
    let (realization, system) = match block {
        Block::None => return Err(CliError::parse(0, "system", "no [state-space] or [transfer-function] block")),
        Block::StateSpace => {
            let n_field = get("n")?;
            let n: usize = n_field
                .value
                .parse()
                .ok()
                .filter(|&n| n >= 1)
                .ok_or_else(|| CliError::parse(n_field.line, "n", "expected a positive integer"))?;
            let a = numbers(get("A")?, "A", n * n)?;
            let b = numbers(get("b")?, "b", n)?;
            let c = numbers(get("c")?, "c", n)?;
            let a = Matrix64::from_row_major(n, n, a).map_err(CliError::System)?;
            (Realization::StateSpace, StateSpace64::new(a, b, c).map_err(CliError::System)?)
        }
        Block::TransferFunction => {
            let num_field = get("num")?;
            let den_field = get("den")?;
            let num = numbers(num_field, "num", 0)?;
            let den = numbers(den_field, "den", 0)?;
            let system = companion(&num, &den, num_field.line, den_field.line)?;
            (Realization::Companion { num, den }, system)
        }
    };
    Ok(SystemSpec {
        label: label.map(|f| f.value),
        realization,
        system,
    })
}

/// Parses a number list; `expected == 0` accepts any non-empty length.
fn numbers(field: &Field, name: &str, expected: usize) -> Result<Vec<f64>, CliError> {
    let body = field.value.trim().trim_start_matches('[').trim_end_matches(']');
    let mut out = Vec::new();
    for tok in body.split(|c: char| c.is_whitespace() || c == ',' || c == ';').filter(|t| !t.is_empty()) {
        let v: f64 = tok
            .parse()
            .map_err(|_| CliError::parse(field.line, name, format!("`{tok}` is not a number")))?;
        if !v.is_finite() {
            return Err(CliError::parse(field.line, name, format!("`{tok}` is not finite")));
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err(CliError::parse(field.line, name, "no values"));
    }
    if expected != 0 && out.len() != expected {
        return Err(CliError::parse(
            field.line,
            name,
            format!("expected {expected} values, got {}", out.len()),
        ));
    }
    Ok(out)
}

/// `A` with ones on the superdiagonal and the negated monic denominator in the
/// last row, `b = e_n`, `c` the ascending numerator padded with zeros.
pub fn companion(num: &[f64], den: &[f64], num_line: usize, den_line: usize) -> Result<StateSpace64, CliError> {
    let lead = den[0];
    if lead == 0.0 {
        return Err(CliError::parse(den_line, "den", "leading coefficient must be nonzero"));
    }
    let n = den.len() - 1;
    if n == 0 {
        return Err(CliError::parse(den_line, "den", "denominator must have degree at least 1"));
    }
    let first = num
        .iter()
        .position(|&x| x != 0.0)
        .ok_or_else(|| CliError::parse(num_line, "num", "numerator is identically zero"))?;
    let num = &num[first..];
    if num.len() > n {
        return Err(CliError::parse(
            num_line,
            "num",
            format!("numerator degree {} must be below denominator degree {n}", num.len() - 1),
        ));
    }
    let mut a = Matrix64::zeros(n, n);
    for i in 0..n - 1 {
        a[(i, i + 1)] = 1.0;
    }
    for j in 0..n {
        a[(n - 1, j)] = -den[n - j] / lead;
    }
    let mut b = vec![0.0; n];
    b[n - 1] = 1.0;
    let mut c = vec![0.0; n];
    for (j, &q) in num.iter().rev().enumerate() {
        c[j] = q / lead;
    }
    StateSpace64::new(a, b, c).map_err(CliError::System)
}
