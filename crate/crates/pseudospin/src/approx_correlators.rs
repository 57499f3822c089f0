//! Theta-function approximations of the correlators and their asymptotic
//! collapses.
//!
//! Replacing the binned window sums by their dominant Poisson images turns
//! each correlator into a short combination of Jacobi theta values and
//! `x erf(x)` staircase sums. The result is cheap and smooth in the
//! parameters, at the price of a validity domain: the Gaussian comb must be
//! wide (`gamma1 ell^2` of order one or less) and the transverse oscillation
//! slow (`|gamma3| ell^2` well under one). [`in_validity_domain`] encodes
//! those bounds; outside them the formulas degrade smoothly but can be badly
//! wrong, so callers route through [`classify_regime`] and fall back to the
//! exact engines.
//!
//! Deep squeezing collapses the picture further: every correlator becomes a
//! function of the single combination `x = e^r phi` (plus the bin width),
//! evaluated by [`triple_collapsed`]. Phases near the conjugate orientation
//! fold onto the same curve with flipped z/y signs, degenerating at the
//! orientation itself to the saturated [`dual_saddle_triple`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exact_correlators::{Binning, CorrelatorTriple};
use crate::special_functions::{erf, erf_complex, theta_scaled, ThetaKind};
use crate::squeezed_state::{canonicalize_phi, gamma_set, SqueezingParams};

use std::f64::consts::PI;

/// Hard ceiling on the staircase sum length; the default length is set by
/// the bin geometry, so hitting this means degenerate parameters.
const STAIRCASE_CAP: usize = 2_000_000;

fn staircase_len(ell: f64, gamma2: f64, q_lim: Option<usize>) -> Result<usize> {
    let n = match q_lim {
        Some(n) => n,
        None => (4.0 / (ell * gamma2.sqrt())).ceil() as usize + 8,
    };
    if n > STAIRCASE_CAP {
        return Err(Error::TruncationNotConverged(format!(
            "staircase sum needs {n} terms, cap is {STAIRCASE_CAP}"
        )));
    }
    Ok(n)
}

/// Validity bounds of the theta approximation: wide Gaussian comb and slow
/// transverse oscillation.
pub fn in_validity_domain(p: &SqueezingParams, binning: &Binning) -> Result<bool> {
    let g = gamma_set(p)?;
    let l2 = binning.ell() * binning.ell();
    Ok(g.gamma1 * l2 <= 2.0 && g.gamma3.abs() * l2 <= 0.3)
}

/// Theta approximation of `<Sz Sz>`, evaluated at the phase as given.
pub fn szsz_approx(p: &SqueezingParams, binning: &Binning, q_lim: Option<usize>) -> Result<f64> {
    let g = gamma_set(p)?;
    let ell = binning.ell();
    let l2 = ell * ell;
    let qlim = staircase_len(ell, g.gamma2, q_lim)?;
    let sg2 = g.gamma2.sqrt();
    let u = |x: f64| x * erf(ell * sg2 * x);
    let zero = Complex64::new(0.0, 0.0);
    let t3q = theta_scaled(ThetaKind::Three, zero, g.gamma1 * l2 / 4.0, 0.0)?.re;
    let t4q = theta_scaled(ThetaKind::Four, zero, g.gamma2 * l2 / 4.0, 0.0)?.re;
    let t3 = theta_scaled(ThetaKind::Three, zero, g.gamma1 * l2, 0.0)?.re;
    let t2 = theta_scaled(ThetaKind::Two, zero, g.gamma1 * l2, 0.0)?.re;
    let mut s1 = 0.0;
    let mut s2 = 0.0;
    for q in 0..qlim {
        let qf = q as f64;
        s1 += u(qf + 0.5) + u(qf - 0.5) - 2.0 * u(qf);
        s2 += u(qf + 1.0) + u(qf) - 2.0 * u(qf + 0.5);
    }
    let base = ell * (g.gamma1 / PI).sqrt();
    Ok(-2.0 / PI * (g.gamma1 / g.gamma2).sqrt() * t3q * t4q - base * t3 * erf(sg2 * ell / 2.0)
        + 2.0 * base * t3 * s1
        - 2.0 * base * t2 * s2)
}

/// Theta approximation of `(<Sx Sx>, <Sy Sy>)`, at the phase as given.
pub fn transverse_approx(
    p: &SqueezingParams,
    binning: &Binning,
    q_lim: Option<usize>,
) -> Result<(f64, f64)> {
    let g = gamma_set(p)?;
    let ell = binning.ell();
    let l2 = ell * ell;
    let qlim = staircase_len(ell, g.gamma2, q_lim)? as i64;
    let sg2 = g.gamma2.sqrt();

    // The tilt enters as exp(+gamma4^2 ell^2 / gamma2) inside the staircase
    // terms; refuse it before it turns into infinities.
    let tilt_exp = g.gamma4 * g.gamma4 * l2 / g.gamma2;
    if tilt_exp > 700.0 {
        return Err(Error::Overflow(format!(
            "transverse tilt exponent {tilt_exp:.1} exceeds f64 range"
        )));
    }

    let u = |x: f64| x * erf(ell * sg2 * x);
    let gauss = |x: f64| (-g.gamma2 * l2 * x * x).exp();
    let uc = |w: Complex64| -> Result<Complex64> { Ok(w * erf_complex(ell * sg2 * w)?) };
    let gauss_c = |w: Complex64| (-g.gamma2 * l2 * w * w).exp();

    let c = Complex64::new(0.0, g.gamma4 / g.gamma2);
    let pref_g = 1.0 / (ell * (PI * g.gamma2).sqrt());

    let stair1 = |q: f64| {
        2.0 * (u(q - 0.5) + u(q + 0.5) - 2.0 * u(q))
            + 2.0 * pref_g * (gauss(q - 0.5) + gauss(q + 0.5) - 2.0 * gauss(q))
    };
    let stair2 = |q: f64| -> Result<f64> {
        let w = Complex64::new(q, 0.0) + c;
        let wl = Complex64::new(q - 0.5, 0.0) + c;
        let wh = Complex64::new(q + 0.5, 0.0) + c;
        let val = uc(wl)? + uc(wh)? - 2.0 * uc(w)?
            + pref_g * (gauss_c(wl) + gauss_c(wh) - 2.0 * gauss_c(w));
        Ok(2.0 * val.re)
    };

    let mut q1e = 0.0;
    let mut q1o = 0.0;
    let mut q2e = 0.0;
    let mut q2o = 0.0;
    for q in -qlim..=qlim {
        let qf = q as f64;
        if q.rem_euclid(2) == 0 {
            q1e += stair1(qf);
            q2e += stair2(qf)?;
        } else {
            q1o += stair1(qf);
            q2o += stair2(qf)?;
        }
    }

    let a_nome = 4.0 * g.gamma1 * l2;
    let zz = Complex64::new(2.0 * g.gamma3 * l2, g.gamma1 * l2);
    let phase13 = Complex64::from_polar(1.0, g.gamma3 * l2);
    let mag13 = -g.gamma1 * l2 / 2.0;
    let p3 = (phase13 * theta_scaled(ThetaKind::Three, zz, a_nome, mag13)?).re;
    let p2 = (phase13 * theta_scaled(ThetaKind::Two, zz, a_nome, mag13)?).re;

    let log24 = -(g.gamma1 / 4.0 + g.gamma2 / 4.0 + g.gamma4 * g.gamma4 / g.gamma2) * l2;
    let zi = Complex64::new(0.0, g.gamma1 * l2);
    let t2i = theta_scaled(ThetaKind::Two, zi, a_nome, log24)?.re;
    let t3i = theta_scaled(ThetaKind::Three, zi, a_nome, log24)?.re;

    let base = ell * (PI / g.gamma2).sqrt();
    let x1 = base * (p3 * q1e + p2 * q1o);
    let x3 = base * (p3 * q1o + p2 * q1e);
    let x2 = base * (t2i * q2o + t3i * q2e);
    let x4 = base * (t2i * q2e + t3i * q2o);

    let pref = (g.gamma1 * g.gamma2).sqrt() / (2.0 * PI);
    Ok((
        pref * (x1 + x2 + x3 + x4),
        pref * (-x1 - x3 + x2 + x4),
    ))
}

/// All three approximate correlators, phase folded and duality signs applied,
/// mirroring the exact bundler.
pub fn triple_approx(
    p: &SqueezingParams,
    binning: &Binning,
    q_lim: Option<usize>,
) -> Result<CorrelatorTriple> {
    let rec = canonicalize_phi(p);
    let szsz = szsz_approx(&rec.params, binning, q_lim)?;
    let (sxsx, sysy) = transverse_approx(&rec.params, binning, q_lim)?;
    Ok(CorrelatorTriple {
        szsz: rec.sz_sign * szsz,
        sxsx: rec.sx_sign * sxsx,
        sysy: rec.sy_sign * sysy,
    })
}

/// Deep-squeezing regimes where the collapsed description applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// No collapse; use the exact engines or, in its domain, the theta
    /// approximation.
    Generic,
    /// Strong squeezing, phase near alignment: correlators depend on
    /// `e^r phi` only.
    LargeSqueezing,
    /// Strong squeezing, phase within `~0.1 e^{-r}` of the conjugate
    /// orientation: the folded collapse coordinate is effectively zero and
    /// the triple saturates.
    DualSaddle,
}

/// Classify which collapsed description, if any, covers these parameters.
pub fn classify_regime(p: &SqueezingParams) -> Regime {
    let mut phi = p.phi.rem_euclid(PI);
    if phi > PI / 2.0 {
        phi = PI - phi;
    }
    if p.r > 3.0 {
        if phi.cos() < 0.1 * (-p.r).exp() {
            return Regime::DualSaddle;
        }
        // Both ends of the folded interval collapse: the pi/2 side maps onto
        // the 0 side through the phase duality.
        if phi < 0.2 || PI / 2.0 - phi < 0.2 {
            return Regime::LargeSqueezing;
        }
    }
    Regime::Generic
}

/// Collapsed deep-squeezing triple as a function of `x = e^r phi`.
///
/// Valid for `x > 0`; the reduced width is `2/x^2` and the transverse decay
/// constant `x^2/2`.
pub fn triple_collapsed(
    x: f64,
    binning: &Binning,
    q_lim: Option<usize>,
) -> Result<CorrelatorTriple> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "collapse coordinate must be finite and positive, got {x}"
        )));
    }
    reduced_triple(2.0 / (x * x), x * x / 2.0, binning, q_lim)
}

/// Collapsed triple from the reduced width `g2` and transverse decay `c31`.
fn reduced_triple(
    g2: f64,
    c31: f64,
    binning: &Binning,
    q_lim: Option<usize>,
) -> Result<CorrelatorTriple> {
    let ell = binning.ell();
    let qlim = staircase_len(ell, g2, q_lim)?;
    let sg = g2.sqrt();
    let u = |x: f64| x * erf(ell * sg * x);
    let th4 = theta_scaled(
        ThetaKind::Four,
        Complex64::new(0.0, 0.0),
        g2 * ell * ell / 4.0,
        0.0,
    )?
    .re;
    let mut s = 0.0;
    for q in 0..(2 * qlim + 2) {
        let h = q as f64 / 2.0;
        let term = u(h + 0.5) + u(h - 0.5) - 2.0 * u(h);
        s += if q % 2 == 0 { term } else { -term };
    }
    let szsz = -4.0 / ((PI * g2).sqrt() * ell) * th4 - erf(sg * ell / 2.0) + 2.0 * s;
    let mut s2 = 2.0 * u(0.5);
    for q in 1..(qlim + 2) {
        let qf = q as f64;
        s2 += 2.0 * (u(qf - 0.5) + u(qf + 0.5) - 2.0 * u(qf));
    }
    let sxsx = (-c31 * ell * ell).exp() * (s2 - 2.0 / (ell * (PI * g2).sqrt()) * th4);
    Ok(CorrelatorTriple {
        szsz,
        sxsx,
        sysy: -sxsx,
    })
}

/// Reduced triple at physical parameters: folds the phase, collapses onto
/// the single coordinate `x = e^r phi`, and applies the duality signs.
///
/// The reduced width and transverse decay are both taken from `x` alone
/// (`gamma2 -> 2/x^2`, `gamma3^2/gamma1 -> x^2/2`), so the output is exactly
/// independent of the reference squeezing at fixed `x`. A folded phase small
/// enough that `x` underflows saturates to the aligned limit `(1, 1, -1)`
/// before signs; the reduced form reaches the same limit continuously.
pub fn large_squeezing_triple(p: &SqueezingParams, binning: &Binning) -> Result<CorrelatorTriple> {
    let rec = canonicalize_phi(p);
    let x = p.r.exp() * rec.params.phi;
    let t = if x < 1e-12 {
        CorrelatorTriple {
            szsz: 1.0,
            sxsx: 1.0,
            sysy: -1.0,
        }
    } else {
        triple_collapsed(x, binning, None)?
    };
    Ok(CorrelatorTriple {
        szsz: rec.sz_sign * t.szsz,
        sxsx: rec.sx_sign * t.sxsx,
        sysy: rec.sy_sign * t.sysy,
    })
}

/// Saturated triple at the conjugate orientation: the collapse coordinate
/// vanishes after folding and the duality flips z and y.
pub fn dual_saddle_triple() -> CorrelatorTriple {
    CorrelatorTriple {
        szsz: -1.0,
        sxsx: 1.0,
        sysy: 1.0,
    }
}
