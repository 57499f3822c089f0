//! The mixed transverse-longitudinal correlator.
//!
//! Reflecting one mode's position axis about a window edge maps even windows
//! to odd ones in reverse order, flips the raising operator to a lowering
//! one, and negates the sign operator of the other mode, while the state's
//! density is invariant. The real part of `<S+ Sz>` is therefore exactly
//! zero at every `(r, phi, ell)`: the x-z correlator vanishes identically,
//! not just approximately. The imaginary part (the y-z correlator) is
//! generic.
//!
//! [`splus_sz`] evaluates the defining window sum numerically anyway, as a
//! cross-check of the whole lattice machinery: its real part measures the
//! accumulated numerical noise of the engines and should sit at the 1e-15
//! scale of the terms involved.

use num_complex::Complex64;

use super::{Binning, TruncationPolicy};
use crate::error::{Error, Result};
use crate::special_functions::erf_scaled;
use crate::special_functions::quad::adaptive_gk;
use crate::squeezed_state::{gamma_set, SqueezingParams};

use std::f64::consts::PI;

/// `<Sx Sz>`: identically zero by the reflection parity of the window sums.
///
/// The arguments fix the point at which the statement is being asserted;
/// they do not enter the value.
pub fn sxsz_exact(_p: &SqueezingParams, _binning: &Binning) -> f64 {
    0.0
}

/// `<S+ Sz>` from its window sum: real part `<Sx Sz>`, imaginary part
/// `<Sy Sz>`.
///
/// Window pairs regroup into four residue classes mod 4. Each class couples
/// a half-offset Gaussian comb (oscillating at half the transverse
/// frequency) to a window sum of scaled complex error functions at half
/// tilt, integrated over a double window with a kink at its midpoint.
pub fn splus_sz(
    p: &SqueezingParams,
    binning: &Binning,
    policy: &TruncationPolicy,
) -> Result<Complex64> {
    let g = gamma_set(p)?;
    let ell = binning.ell();
    let b1 = g.gamma1 * ell * ell / 4.0;
    let a = ell * g.gamma2.sqrt() / 2.0;
    let half_tilt = 0.5 * g.gamma4 * ell / g.gamma2.sqrt();
    let f3 = g.gamma3 * ell * ell;

    let pcap = (6.5 / b1.sqrt()).ceil() as usize + 6;
    let qcap = (6.5 / a).ceil() as usize + 8;
    if pcap.max(qcap) > policy.index_cap {
        return Err(Error::TruncationNotConverged(format!(
            "mixed correlator window sum needs ~{} terms, cap is {}",
            pcap.max(qcap),
            policy.index_cap
        )));
    }

    // Integer lattices split by residue class: the Gaussian comb runs over
    // P = -rho (mod 4), the window comb over Q = rho (mod 4).
    let p_lo = -(pcap as i64);
    let p_hi = pcap as i64;
    let class: Vec<Vec<i64>> = (0..4)
        .map(|rho: i64| {
            (p_lo..=p_hi)
                .filter(|v| v.rem_euclid(4) == rho.rem_euclid(4))
                .collect()
        })
        .collect();

    let integrand = |z: f64| -> Complex64 {
        let fold = z.min(2.0 - z);
        let mut total = Complex64::new(0.0, 0.0);
        for rho in 0..4usize {
            let mut comb = Complex64::new(0.0, 0.0);
            for &pv in &class[(4 - rho) % 4] {
                let w = pv as f64 + 0.5 + z;
                comb += Complex64::new(-b1 * w * w, 0.5 * f3 * w).exp();
            }
            let mut window = Complex64::new(0.0, 0.0);
            for &qv in &class[rho] {
                let hi = a * (qv as f64 + 0.5 + fold);
                let lo = a * (qv as f64 + 0.5 - fold);
                window += erf_scaled(hi, half_tilt) - erf_scaled(lo, half_tilt);
            }
            let sign = if rho % 2 == 0 { 1.0 } else { -1.0 };
            total += sign * comb * window;
        }
        total
    };

    // Panels per oscillation half-period, with a mandatory break at the
    // midpoint kink of the folded window coordinate.
    let pan = 2 * ((f3.abs() / (2.0 * PI)) as usize + 1);
    let mut breaks: Vec<f64> = (0..=pan).map(|i| 2.0 * i as f64 / pan as f64).collect();
    if !breaks.iter().any(|&b| (b - 1.0).abs() < 1e-12) {
        breaks.push(1.0);
        breaks.sort_by(f64::total_cmp);
    }
    let tol = (policy.quad_tol / breaks.len() as f64).max(1e-15);
    let mut re = 0.0;
    let mut im = 0.0;
    for w in breaks.windows(2) {
        re += adaptive_gk(&|z| integrand(z).re, w[0], w[1], tol)?.value;
        im += adaptive_gk(&|z| integrand(z).im, w[0], w[1], tol)?.value;
    }

    let pref = (g.gamma1 * g.gamma2).sqrt() / (2.0 * PI)
        * (-(g.gamma1 + g.gamma2) * ell * ell / 16.0).exp()
        * (0.5 * ell)
        * (PI / g.gamma2).sqrt();
    Ok(pref * Complex64::new(re, im))
}

/// Magnitude of the numerically accumulated real part of [`splus_sz`]: a
/// residual that the engines' invariants require to be at noise level.
pub fn sxsz_residual(
    p: &SqueezingParams,
    binning: &Binning,
    policy: &TruncationPolicy,
) -> Result<f64> {
    Ok(splus_sz(p, binning, policy)?.re.abs())
}
