//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Panics only if the target type cannot hold
    /// a finite `f64`, which never happens for `f32`/`f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Decision tolerances used across the toolkit.
///
/// The defaults are tuned for `f64`; for `f32` every tolerance is raised to a
/// fixed multiple of machine epsilon so that the decisions stay meaningful.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<S> {
    /// Relative residual bound for the Lyapunov solve.
    pub lyap_tol: S,
    /// Relative accuracy target for the matrix exponential.
    pub expm_tol: S,
    /// Band for every sign or zero decision on evaluated reals.
    pub eval_eps: S,
}

impl<S: Real> Default for Tolerances<S> {
    fn default() -> Self {
        let eps = S::epsilon();
        Self {
            lyap_tol: S::lit(1e-10).max(S::lit(1e3) * eps),
            expm_tol: S::lit(1e-12).max(S::lit(1e2) * eps),
            eval_eps: S::lit(1e-8).max(S::lit(1e4) * eps),
        }
    }
}

impl<S: Real> Tolerances<S> {
    pub fn with_eval_eps(mut self, eval_eps: S) -> Self {
        self.eval_eps = eval_eps;
        self
    }
}
