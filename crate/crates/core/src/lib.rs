//! Jost solutions, orthonormal-polynomial asymptotics and spectral data for
//! semi-infinite Jacobi matrices whose coefficients grow like `n^σ` and
//! satisfy the critical balance `b_n / (2√(a_{n-1}a_n)) → γ = ±1`.

pub mod ansatz;
pub mod cli;
pub mod coeffs;
pub mod error;
pub mod logc;
pub mod recurrence;
pub mod solutions;
pub mod spectral;
pub mod volterra;

pub use ansatz::{Side, SpectralPoint};
pub use coeffs::{classify, laguerre_model, power_model, reflect, CoefficientModel, CriticalParams};
pub use error::{Error, Result};
pub use logc::LogComplex;
