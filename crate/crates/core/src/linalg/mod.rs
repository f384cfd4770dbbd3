//! Small dense real linear algebra for analysis-scale systems.

pub mod compound;
pub mod eigen;
pub mod expm;
pub mod lu;
pub mod lyapunov;
pub mod matrix;
pub mod resolvent;
pub mod system;

pub use eigen::{eigenvalues, spectral_abscissa};
pub use expm::expm;
pub use lyapunov::{lyapunov_residual, solve_lyapunov, solve_lyapunov_with};
pub use matrix::Matrix;
pub use resolvent::{resolvent_apply, ResolventSolution};
pub use system::{log_grid, SpectralInfo, StateSpace};
