//! Two-mode squeezed vacuum state in the position representation.
//!
//! The state is Gaussian, `psi(q1, q2) = N exp(A (q1^2 + q2^2) - B q1 q2)`,
//! with complex `A`, `B` fixed by the squeezing amplitude `r` and phase
//! `phi`. Everything downstream consumes the four real width/tilt parameters
//!
//! ```text
//! gamma1 = 2 / (cosh 2r + cos 2phi sinh 2r)      (sum-coordinate width)
//! gamma2 = 2 / (cosh 2r - cos 2phi sinh 2r)      (difference-coordinate width)
//! gamma3, gamma4                                  (phase tilts)
//! ```
//!
//! The textbook expressions above lose all precision once `r` is large
//! (`cosh` and `sinh` agree to hundreds of digits), so this module evaluates
//! algebraically equivalent forms built from `exp(-2r)` and `sin/cos` of
//! `phi` alone, exact for every representable `r`. Genuine overflow (for
//! example `gamma2 = 2 exp(2r)` at `phi = 0` once `r > 354`) is reported as
//! an error instead of infinity.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Squeezing amplitude and phase defining a two-mode squeezed vacuum state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SqueezingParams {
    pub r: f64,
    pub phi: f64,
}

impl SqueezingParams {
    /// Validated constructor: `r` must be finite and nonnegative, `phi`
    /// finite. The phase is kept as given; see [`canonicalize_phi`] for the
    /// symmetry reductions.
    pub fn new(r: f64, phi: f64) -> Result<Self> {
        if !r.is_finite() || r < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "squeezing amplitude must be finite and nonnegative, got {r}"
            )));
        }
        if !phi.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "squeezing phase must be finite, got {phi}"
            )));
        }
        Ok(Self { r, phi })
    }
}

/// The four real Gaussian parameters of the state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaSet {
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub gamma4: f64,
}

/// Width and tilt parameters, in forms stable for every representable `r`.
///
/// `gamma1`, `gamma2` are positive; `gamma3`, `gamma4` vanish identically
/// when `sin 2phi = 0`. Errors only when a width genuinely leaves f64 range.
pub fn gamma_set(p: &SqueezingParams) -> Result<GammaSet> {
    let (sp, cp) = p.phi.sin_cos();
    let (sp2, cp2) = (sp * sp, cp * cp);
    let e2 = (-2.0 * p.r).exp();
    let e4 = e2 * e2;
    // 2 e^{-2r} / (cos^2 phi + e^{-4r} sin^2 phi) == 2/(cosh2r + cos2phi sinh2r)
    let gamma1 = 2.0 * e2 / (cp2 + e4 * sp2);
    let gamma2 = 2.0 * e2 / (sp2 + e4 * cp2);
    let t = p.r.tanh();
    let s2 = 2.0 * sp * cp;
    let (gamma3, gamma4) = if s2 == 0.0 {
        (0.0, 0.0)
    } else {
        // 1 - tanh r without cancellation at large r.
        let omt = 2.0 * e2 / (1.0 + e2);
        // t^2 + 2 t cos2phi + 1 == (1-t)^2 + 4 t cos^2 phi, nonnegative terms.
        let d3 = omt * omt + 4.0 * t * cp2;
        let d4 = omt * omt + 4.0 * t * sp2;
        (-2.0 * t * s2 / d3, -2.0 * t * s2 / d4)
    };
    let g = GammaSet {
        gamma1,
        gamma2,
        gamma3,
        gamma4,
    };
    let representable = gamma1.is_finite()
        && gamma2.is_finite()
        && gamma3.is_finite()
        && gamma4.is_finite()
        && gamma1 > 0.0
        && gamma2 > 0.0;
    if !representable {
        return Err(Error::Overflow(format!(
            "state widths at r = {}, phi = {} leave f64 range",
            p.r, p.phi
        )));
    }
    Ok(g)
}

/// Gaussian exponent coefficients `(A, B)` of the wavefunction.
///
/// They satisfy `A + A* = -(gamma1+gamma2)/4`, `A - A* = i(gamma3-gamma4)/2`,
/// `B + B* = (gamma1-gamma2)/2`, `B - B* = -i(gamma3+gamma4)`. Both diverge
/// in the infinite-squeezing limit at `phi = 0`, reported as overflow.
pub fn wavefunction_coefficients(p: &SqueezingParams) -> Result<(Complex64, Complex64)> {
    let d = denom(p);
    let t = p.r.tanh();
    let t2 = t * t;
    let sech = 1.0 / p.r.cosh();
    let (s2, c2) = (2.0 * p.phi).sin_cos();
    // 1 + t^2 cos4phi = sech^2 r + 2 t^2 cos^2 2phi, nonnegative terms.
    let num_a = Complex64::new(sech * sech + 2.0 * t2 * c2 * c2, -2.0 * s2 * c2 * t2);
    let a = num_a / (2.0 * d);
    let b = Complex64::from_polar(2.0 * t, -2.0 * p.phi) / d;
    if a.is_finite() && b.is_finite() {
        Ok((a, b))
    } else {
        Err(Error::Overflow(format!(
            "wavefunction coefficients diverge at r = {}, phi = {}",
            p.r, p.phi
        )))
    }
}

/// `e^{-4 i phi} tanh^2 r - 1`, with both components evaluated free of
/// cancellation: the real part is `-(2 sin^2 2phi tanh^2 r + sech^2 r)`.
fn denom(p: &SqueezingParams) -> Complex64 {
    let t = p.r.tanh();
    let t2 = t * t;
    let sech = 1.0 / p.r.cosh();
    let (s2, c2) = (2.0 * p.phi).sin_cos();
    Complex64::new(-(2.0 * s2 * s2 * t2 + sech * sech), -2.0 * s2 * c2 * t2)
}

/// Normalization constant, principal branch; `|N|^2 = sqrt(gamma1 gamma2) / (2 pi)`.
pub fn prefactor(p: &SqueezingParams) -> Result<Complex64> {
    let d = denom(p);
    let n = 1.0 / (p.r.cosh() * std::f64::consts::PI.sqrt() * (-d).sqrt());
    if n.is_finite() {
        Ok(n)
    } else {
        Err(Error::Overflow(format!(
            "normalization not representable at r = {}, phi = {}",
            p.r, p.phi
        )))
    }
}

/// Position-representation wavefunction at `(q1, q2)`.
pub fn wavefunction(p: &SqueezingParams, q1: f64, q2: f64) -> Result<Complex64> {
    let (a, b) = wavefunction_coefficients(p)?;
    let n = prefactor(p)?;
    Ok(n * (a * (q1 * q1 + q2 * q2) - b * (q1 * q2)).exp())
}

/// Wigner function of the state at phase-space point `(q1, q2, p1, p2)`.
///
/// For a Gaussian pure state this is
/// `W = pi^-2 exp(-x^T U x - (p - V x)^T U^-1 (p - V x))` with
/// `U = Re M`, `V = Im M`, `M` the quadratic-form matrix of the exponent
/// (momentum kernel `exp(-2i p . y)`).
pub fn wigner(p: &SqueezingParams, q1: f64, q2: f64, p1: f64, p2: f64) -> Result<f64> {
    let g = gamma_set(p)?;
    let u11 = 0.25 * (g.gamma1 + g.gamma2);
    let u12 = 0.25 * (g.gamma1 - g.gamma2);
    let v11 = 0.5 * (g.gamma3 - g.gamma4);
    let v12 = 0.5 * (g.gamma3 + g.gamma4);
    let det = 0.25 * g.gamma1 * g.gamma2;
    let w1 = p1 + v11 * q1 + v12 * q2;
    let w2 = p2 + v12 * q1 + v11 * q2;
    let xux = u11 * (q1 * q1 + q2 * q2) + 2.0 * u12 * q1 * q2;
    let wuw = (u11 * (w1 * w1 + w2 * w2) - 2.0 * u12 * w1 * w2) / det;
    Ok((-xux - wuw).exp() / (std::f64::consts::PI * std::f64::consts::PI))
}

/// A phase folded into the fundamental domain `[0, pi/4]`, with the signs
/// relating correlators at the original phase to those at the folded one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DualityRecord {
    pub params: SqueezingParams,
    /// `<Sz Sz>(original) = sz_sign * <Sz Sz>(folded)`.
    pub sz_sign: f64,
    /// Always +1: the x correlator is invariant under both reductions.
    pub sx_sign: f64,
    /// Equal to `sz_sign`.
    pub sy_sign: f64,
}

/// Folds `phi` into `[0, pi/4]` using the state's exact symmetries.
///
/// The phase is pi-periodic; `phi -> pi - phi` conjugates the state and
/// leaves all three correlators unchanged; `phi -> pi/2 - phi` swaps the
/// width parameters, flipping the sign of the z and y correlators while
/// preserving x.
pub fn canonicalize_phi(p: &SqueezingParams) -> DualityRecord {
    let pi = std::f64::consts::PI;
    let mut phi = p.phi.rem_euclid(pi);
    if phi > 0.5 * pi {
        phi = pi - phi;
    }
    let mut sz_sign = 1.0;
    if phi > 0.25 * pi {
        phi = 0.5 * pi - phi;
        sz_sign = -1.0;
    }
    DualityRecord {
        params: SqueezingParams { r: p.r, phi },
        sz_sign,
        sx_sign: 1.0,
        sy_sign: sz_sign,
    }
}
