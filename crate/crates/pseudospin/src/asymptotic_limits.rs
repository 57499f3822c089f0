//! Closed forms for the wide-bin and narrow-bin limits.
//!
//! Wide bins: only the sign of each position survives, so `<Sz Sz>` tends to
//! the two-sided Gaussian orthant correlation and the transverse correlators
//! die off as Gaussians in `ell`. Narrow bins: parity flips become
//! transparent, `<Sx Sx> -> 1`, while sign correlations wash out.

use crate::error::Result;
use crate::exact_correlators::{Binning, CorrelatorTriple};
use crate::squeezed_state::{gamma_set, SqueezingParams};

use std::f64::consts::PI;

/// Switch to the sinh-free form of the orthant argument; `exp(-4r)` is far
/// below the square of `sin 2phi` resolution by then.
const LARGE_R_SWITCH: f64 = 20.0;

/// Limit of `<Sz Sz>` as `ell -> infinity`: the orthant correlation
/// `(2/pi) atan(cos 2phi sinh 2r / sqrt(1 + sin^2 2phi sinh^2 2r))`.
///
/// Finite for every representable `r`; large amplitudes take a rearranged
/// branch that never forms `sinh` of a huge argument.
pub fn szsz_large_ell(p: &SqueezingParams) -> f64 {
    let c = (2.0 * p.phi).cos();
    let s = (2.0 * p.phi).sin();
    let arg = if p.r > LARGE_R_SWITCH {
        // sinh(2r) ~ e^{2r}/2: divide through and absorb the exponential.
        c / (4.0 * (-4.0 * p.r).exp() + s * s).sqrt()
    } else {
        let sh = (2.0 * p.r).sinh();
        c * sh / (1.0 + s * s * sh * sh).sqrt()
    };
    2.0 / PI * arg.atan()
}

/// Wide-bin plateau of the optimized CHSH value: the transverse correlators
/// vanish, leaving `2 |<Sz Sz>|` at its limiting value.
pub fn bell_large_ell(p: &SqueezingParams) -> f64 {
    2.0 * szsz_large_ell(p).abs()
}

/// Narrow-bin limits of the three correlators.
pub fn small_ell_limits() -> CorrelatorTriple {
    CorrelatorTriple {
        szsz: 0.0,
        sxsx: 1.0,
        sysy: 0.0,
    }
}

/// Leading exponential scale of `<Sz Sz>` for narrow bins,
/// `2 exp(-pi^2 / (gamma2 ell^2))`.
///
/// This captures the exponential order only: its prefactor overshoots the
/// true narrow-bin coefficient by a constant factor of `pi^2/4`, so use it
/// as a decay scale, not as a numerical approximation of the correlator.
pub fn szsz_small_ell_leading(p: &SqueezingParams, binning: &Binning) -> Result<f64> {
    let g = gamma_set(p)?;
    let ell = binning.ell();
    Ok(2.0 * (-PI * PI / (g.gamma2 * ell * ell)).exp())
}
