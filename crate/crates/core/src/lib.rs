//! Numerical checks of periodic monotonicity preservation for stable
//! single-input single-output LTI systems, built on the impulse-response
//! autocorrelation `R(t) = c e^{At} P cᵀ`.
//!
//! Everything is generic over [`Real`] (`f32`, `f64`); the `*64` aliases below
//! fix the scalar to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod autocorr;
pub mod certificates;
pub mod error;
pub mod gain;
pub mod linalg;
pub mod scalar;
pub mod signals;

pub use autocorr::{AutocorrelationModel, PeriodizedModel};
pub use certificates::{CheckGrid, ConditionResult, PmpCertificate, PmpVerdict, TailPolicy, Verdict};
pub use error::{Error, Result};
pub use gain::{GainSweep, GainVerdict, MonotonicityReport, Spacing};
pub use linalg::{Matrix, SpectralInfo, StateSpace};
pub use scalar::{Real, Tolerances};
pub use signals::{KernelTestMode, SampledPeriodicSignal, VariationCount};

pub type Matrix64 = Matrix<f64>;
pub type StateSpace64 = StateSpace<f64>;
pub type SpectralInfo64 = SpectralInfo<f64>;
pub type Tolerances64 = Tolerances<f64>;
pub type AutocorrelationModel64 = AutocorrelationModel<f64>;
pub type PeriodizedModel64 = PeriodizedModel<f64>;
pub type CheckGrid64 = CheckGrid<f64>;
pub type ConditionResult64 = ConditionResult<f64>;
pub type PmpCertificate64 = PmpCertificate<f64>;
pub type MonotonicityReport64 = MonotonicityReport<f64>;
pub type GainSweep64 = GainSweep<f64>;
pub type SampledPeriodicSignal64 = SampledPeriodicSignal<f64>;

pub type Matrix32 = Matrix<f32>;
pub type StateSpace32 = StateSpace<f32>;
