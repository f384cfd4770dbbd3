use std::path::PathBuf;

use lti_pmp::certificates::DEFAULT_GRID_POINTS;
use lti_pmp::gain::{default_sweep_range, DEFAULT_SWEEP_POINTS};
use lti_pmp::{CheckGrid64, StateSpace64, TailPolicy, Tolerances64};

use crate::error::CliError;
use crate::report::Section;

/// User overrides; `None` means "use the default for this system".
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AnalysisConfig {
    pub t_max: Option<f64>,
    pub grid_n: Option<usize>,
    pub eps: Option<f64>,
    pub sweep_lo: Option<f64>,
    pub sweep_hi: Option<f64>,
    pub sweep_points: Option<usize>,
    pub k_max: Option<u32>,
    pub out: Option<PathBuf>,
}

pub const DEFAULT_K_MAX: u32 = 8;

fn positive(name: &str, v: Option<f64>) -> Result<(), CliError> {
    match v {
        Some(x) if !(x > 0.0 && x.is_finite()) => Err(CliError::Config(format!("--{name} must be positive, got {x}"))),
        _ => Ok(()),
    }
}

/// Sweep range actually used, and whether it came from the defaults.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRange {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub defaulted: bool,
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        positive("t-max", self.t_max)?;
        positive("eps", self.eps)?;
        positive("sweep-lo", self.sweep_lo)?;
        positive("sweep-hi", self.sweep_hi)?;
        if let Some(n) = self.grid_n {
            if n < lti_pmp::certificates::MIN_GRID_POINTS {
                return Err(CliError::Config(format!(
                    "--grid-n must be at least {}, got {n}",
                    lti_pmp::certificates::MIN_GRID_POINTS
                )));
            }
        }
        if matches!(self.sweep_points, Some(p) if p < 2) {
            return Err(CliError::Config("--sweep-points must be at least 2".into()));
        }
        if matches!(self.k_max, Some(k) if k < 2) {
            return Err(CliError::Config("--k-max must be at least 2".into()));
        }
        Ok(())
    }

    pub fn tolerances(&self) -> Tolerances64 {
        let tol = Tolerances64::default();
        match self.eps {
            Some(e) => tol.with_eval_eps(e),
            None => tol,
        }
    }

    pub fn eps(&self) -> f64 {
        self.tolerances().eval_eps
    }

    pub fn k_max(&self) -> u32 {
        self.k_max.unwrap_or(DEFAULT_K_MAX)
    }

    pub fn grid(&self, spectral: &lti_pmp::SpectralInfo64) -> Result<CheckGrid64, CliError> {
        let base = CheckGrid64::default_for(spectral);
        Ok(CheckGrid64::new(
            self.t_max.unwrap_or(base.t_max),
            self.grid_n.unwrap_or(DEFAULT_GRID_POINTS),
            TailPolicy::AsymptoticSign,
        )?)
    }

    pub fn sweep(&self, sys: &StateSpace64) -> Result<SweepRange, CliError> {
        let (dlo, dhi) = default_sweep_range(sys);
        let range = SweepRange {
            lo: self.sweep_lo.unwrap_or(dlo),
            hi: self.sweep_hi.unwrap_or(dhi),
            points: self.sweep_points.unwrap_or(DEFAULT_SWEEP_POINTS),
            defaulted: self.sweep_lo.is_none() && self.sweep_hi.is_none() && self.sweep_points.is_none(),
        };
        if range.lo >= range.hi {
            return Err(CliError::Config(format!(
                "sweep range is empty: lo = {} is not below hi = {}",
                range.lo, range.hi
            )));
        }
        Ok(range)
    }

    pub fn describe_grid(&self, s: &mut Section, grid: &CheckGrid64, required: f64) {
        s.num("t_max", grid.t_max)
            .put("t_max_source", source(self.t_max.is_some()))
            .put("points", grid.points)
            .put("points_source", source(self.grid_n.is_some()))
            .num("spacing", grid.spacing())
            .num("required_horizon", required)
            .put("tail_policy", grid.tail_policy.as_str())
            .num("eps", self.eps())
            .put("eps_source", source(self.eps.is_some()));
    }
}

impl SweepRange {
    pub fn describe(&self, s: &mut Section) {
        s.num("lo", self.lo)
            .num("hi", self.hi)
            .put("points", self.points)
            .put("spacing", "log")
            .put("source", if self.defaulted { "default" } else { "override" });
    }
}

fn source(overridden: bool) -> &'static str {
    if overridden {
        "override"
    } else {
        "default"
    }
}
