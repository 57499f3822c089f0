//! Special functions needed by the correlator engines.
//!
//! Everything here is hand-rolled on purpose: the engines need scaled variants
//! (`exp(-b^2) erf(x+ib)`, `exp(L) theta_k(z, e^{-a})`) whose naive evaluation
//! overflows long before the parameter ranges of interest, so the exponential
//! prefactors are fused into series terms instead of being applied afterwards.

mod erf;
mod faddeeva;
pub mod quad;
mod theta;

pub use erf::{erf, erfc, erfcx};
pub use faddeeva::{erf_complex, erf_scaled, erfc_scaled, faddeeva_w};
pub use theta::{theta, theta4_prime, theta_scaled, ThetaKind};
