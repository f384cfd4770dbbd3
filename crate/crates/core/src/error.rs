use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the analysis routines.
///
/// Numeric payloads are stored as `f64` regardless of the scalar type used for
/// the computation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not Hurwitz (spectral abscissa {abscissa}); offending eigenvalues: {}", format_eigs(.offending))]
    NotHurwitz {
        abscissa: f64,
        offending: Vec<(f64, f64)>,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("quadrature horizon {horizon} too short, tail bound {tail:e} exceeds tolerance; need horizon >= {required}")]
    InsufficientHorizon {
        horizon: f64,
        required: f64,
        tail: f64,
    },

    #[error("amplitude search bracketing failed: {0}")]
    Bracketing(String),
}

fn format_eigs(eigs: &[(f64, f64)]) -> String {
    eigs.iter()
        .map(|(re, im)| {
            if *im == 0.0 {
                format!("{re}")
            } else if *im > 0.0 {
                format!("{re}+{im}i")
            } else {
                format!("{re}{im}i")
            }
        })
        .collect::<Vec<_>>()
        .join(", ")
}
