//! Pseudo-spin correlators and CHSH Bell tests for two-mode squeezed vacuum states.
//!
//! A two-mode squeezed vacuum is parameterized by a squeezing amplitude `r >= 0`
//! and a squeezing angle `phi`. Coarse-graining each mode's position axis into
//! bins of width `ell` defines pseudo-spin operators (sign of the bin index and
//! bin-parity flips), whose two-mode correlators enter a CHSH Bell expression.
//! This crate evaluates those correlators exactly (lattice sums accelerated by
//! Poisson resummation), through theta-function approximations in their validity
//! domain, and in closed form in asymptotic regimes, then scans squeezing
//! parameter space for Bell violations.
//!
//! Conventions used throughout:
//!
//! * `gamma1..gamma4` are the inverse-covariance parameters of the position
//!   wavefunction in rotated quadratures; see [`squeezed_state`].
//! * Bin widths are usually supplied as `log2(ell)`; `ell` itself is strictly
//!   positive.
//! * Correlators are dimensionless and bounded by 1 in magnitude; CHSH values
//!   are bounded by `2*sqrt(2)`.

pub mod approx_correlators;
pub mod asymptotic_limits;
pub mod bell;
pub mod cli;
mod error;
pub mod exact_correlators;
pub mod oracles;
pub mod scan;
pub mod special_functions;
pub mod squeezed_state;

pub use error::{Error, Result};

/// Complex value type used across the public API.
pub type ComplexValue = num_complex::Complex64;
