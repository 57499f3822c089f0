//! Exact pseudo-spin correlators of the binned two-mode state.
//!
//! Binning each mode's position axis into windows of width `ell` and assigning
//! spin-up/down by window parity turns the state's position density into
//! three correlators: `<Sz Sz>` (sign-sign), `<Sx Sx>` and `<Sy Sy>` (parity
//! flips, which couple neighbouring windows coherently). Integrating the
//! Gaussian density over window pairs and regrouping the double window sum by
//! parity reduces each correlator to a one-dimensional integral over a single
//! window of products of two lattice combs (see [`lattice`]): a Gaussian comb
//! from the density profile and an error-function comb from the window
//! boundaries. The regrouping is exact and cancellation-free: parity classes
//! are assembled from plain and alternating combs instead of subtracting two
//! nearly equal lattice sums.
//!
//! [`z_term`] and [`x_terms`] expose the raw window-pair contributions for
//! diagnostics; the engines never sum them directly.

mod lattice;
mod sxsz;

pub use sxsz::{splus_sz, sxsz_exact, sxsz_residual};

use std::cell::RefCell;

use crate::error::{Error, Result};
use crate::special_functions::quad::{adaptive_gk, fixed_gk};
use crate::special_functions::{erf, erf_scaled, erfc, erfc_scaled};
use crate::squeezed_state::{canonicalize_phi, gamma_set, SqueezingParams};
use lattice::{e2comb, e2comb_alt, ecomb, ecomb_alt, gcomb, gcomb_alt};

use std::f64::consts::PI;

/// Truncation and tolerance knobs for the exact engines.
#[derive(Clone, Copy, Debug)]
pub struct TruncationPolicy {
    /// Hard ceiling on the term count of any single lattice sum. The engines
    /// always use the cheaper of two dual representations, so hitting this
    /// cap means the parameters are genuinely outside evaluable range.
    pub index_cap: usize,
    /// Absolute tolerance for each window integral.
    pub quad_tol: f64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            index_cap: 500_000,
            quad_tol: 1e-12,
        }
    }
}

/// Position-axis binning: windows of width `ell`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Binning {
    ell: f64,
}

impl Binning {
    /// Window width; must be finite and strictly positive.
    pub fn new(ell: f64) -> Result<Self> {
        if !ell.is_finite() || ell <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "bin width must be finite and positive, got {ell}"
            )));
        }
        Ok(Self { ell })
    }

    /// Convenience constructor from `log2(ell)`.
    pub fn from_log2(log2_ell: f64) -> Result<Self> {
        if !log2_ell.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "log2 bin width must be finite, got {log2_ell}"
            )));
        }
        Self::new(log2_ell.exp2())
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }
}

/// The three diagonal spin-spin correlators.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelatorTriple {
    pub szsz: f64,
    pub sxsx: f64,
    pub sysy: f64,
}

/// Gaussian prefactors beyond this are below every tolerance in use, so the
/// corresponding integral is skipped rather than evaluated as noise.
const NEGLIGIBLE_EXPONENT: f64 = 60.0;

/// Above this many oscillation panels, per-panel adaptive refinement is
/// replaced by one fixed rule per half-period (plus a doubled check).
const MAX_ADAPTIVE_PANELS: usize = 48;

/// Derived kernel parameters shared by every correlator at fixed
/// `(r, phi, ell)`.
struct Kernel {
    b1: f64,
    a: f64,
    f3: f64,
    f4: f64,
    bb: f64,
    pref: f64,
    cap: usize,
    quad_tol: f64,
}

impl Kernel {
    fn new(p: &SqueezingParams, binning: &Binning, policy: &TruncationPolicy) -> Result<Self> {
        let g = gamma_set(p)?;
        let ell = binning.ell;
        Ok(Self {
            b1: g.gamma1 * ell * ell / 4.0,
            a: ell * g.gamma2.sqrt() / 2.0,
            f3: g.gamma3 * ell * ell,
            f4: g.gamma4 * ell * ell,
            bb: g.gamma4 * ell / g.gamma2.sqrt(),
            pref: 0.5 * ell * (g.gamma1 / PI).sqrt(),
            cap: policy.index_cap,
            quad_tol: policy.quad_tol,
        })
    }

    /// `<Sz Sz>` before any phase folding.
    ///
    /// Window sums regrouped by joint parity: with U/D the plain/alternating
    /// Gaussian combs and Qu/Qd the plain/alternating boundary combs,
    /// `sum_even - sum_odd == (U Qd + D Qu) / 2`.
    fn szsz(&self) -> Result<f64> {
        let f = |z: f64| -> Result<f64> {
            let u = gcomb(self.b1, 0.0, 1.0, z, self.cap)?;
            let d = gcomb_alt(self.b1, 0.0, 1.0, z, self.cap)?;
            let qu = ecomb(self.a, z, 1.0, self.cap)?;
            let qd = ecomb_alt(self.a, z, 1.0, self.cap)?;
            Ok(0.5 * (u * qd + d * qu))
        };
        Ok(self.pref * integrate_uniform(f, 0.0, 1.0, 1, self.quad_tol)?)
    }

    /// The two transverse window integrals: the oscillatory one (odd Gaussian
    /// lattice, frequency `f3`) and the tilted one (scaled-erf windows,
    /// frequency `f4`). `<Sx Sx> = pref (I13 + I24)`,
    /// `<Sy Sy> = pref (I24 - I13)`.
    fn transverse(&self) -> Result<(f64, f64)> {
        let i13 = if self.b1 > NEGLIGIBLE_EXPONENT {
            0.0
        } else {
            let damp = -self.b1;
            let f = |z: f64| -> Result<f64> {
                let cu = 2.0 * damp.exp() * gcomb(self.b1, self.f3, 2.0, z + 1.0, self.cap)?;
                let cd = 2.0 * damp.exp() * gcomb_alt(self.b1, self.f3, 2.0, z + 1.0, self.cap)?;
                let bu = ecomb(self.a, z, 2.0, self.cap)?;
                let bd = ecomb_alt(self.a, z, 2.0, self.cap)?;
                Ok(0.5 * (cu * bu + cd * bd))
            };
            integrate_uniform(f, 0.0, 1.0, oscillation_panels(self.f3), self.quad_tol)?
        };
        let a2 = self.a * self.a;
        let i24 = if a2 > NEGLIGIBLE_EXPONENT {
            0.0
        } else {
            let damp = -a2;
            let f = |z: f64| -> Result<f64> {
                let cu = 2.0 * damp.exp() * gcomb(self.b1, 0.0, 2.0, z + 1.0, self.cap)?;
                let cd = 2.0 * damp.exp() * gcomb_alt(self.b1, 0.0, 2.0, z + 1.0, self.cap)?;
                let bu = e2comb(self.a, self.bb, z, 2.0, self.cap)?;
                let bd = e2comb_alt(self.a, self.bb, z, 2.0, self.cap)?;
                Ok(0.5 * (cu * bu + cd * bd))
            };
            integrate_uniform(f, 0.0, 1.0, oscillation_panels(self.f4), self.quad_tol)?
        };
        Ok((i13, i24))
    }
}

fn oscillation_panels(freq: f64) -> usize {
    (freq.abs() / PI) as usize + 1
}

/// Integrate a fallible integrand over `[lo, hi]` split into `panels` equal
/// segments. Few segments: adaptive refinement per segment. Many segments
/// (strongly oscillatory case): one 15-point rule per segment, verified by a
/// doubled pass.
fn integrate_uniform<F>(f: F, lo: f64, hi: f64, panels: usize, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let breaks: Vec<f64> = (0..=panels)
        .map(|i| lo + (hi - lo) * i as f64 / panels as f64)
        .collect();
    integrate_with_breaks(f, &breaks, tol)
}

fn integrate_with_breaks<F>(f: F, breaks: &[f64], tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let poison: RefCell<Option<Error>> = RefCell::new(None);
    let g = |z: f64| match f(z) {
        Ok(v) => v,
        Err(e) => {
            poison.borrow_mut().get_or_insert(e);
            0.0
        }
    };
    let nseg = breaks.len() - 1;
    let mut quad_failure = None;
    let mut value = 0.0;
    if nseg <= MAX_ADAPTIVE_PANELS {
        let seg_tol = (tol / nseg as f64).max(1e-15);
        for w in breaks.windows(2) {
            match adaptive_gk(&g, w[0], w[1], seg_tol) {
                Ok(r) => value += r.value,
                Err(e) => {
                    quad_failure = Some(e);
                    break;
                }
            }
        }
    } else {
        let mut coarse = 0.0;
        let mut fine = 0.0;
        for w in breaks.windows(2) {
            coarse += fixed_gk(&g, w[0], w[1], 1).value;
            fine += fixed_gk(&g, w[0], w[1], 2).value;
        }
        if (coarse - fine).abs() > (100.0 * tol).max(1e-11 * fine.abs()) {
            quad_failure = Some(Error::QuadratureNonConvergence(format!(
                "oscillatory segmentation unstable: {coarse} vs {fine} over {nseg} segments"
            )));
        }
        value = fine;
    }
    if let Some(e) = poison.into_inner() {
        return Err(e);
    }
    if let Some(e) = quad_failure {
        return Err(e);
    }
    Ok(value)
}

/// `<Sz Sz>` evaluated at the given phase as-is (no folding).
pub fn szsz_exact(p: &SqueezingParams, binning: &Binning, policy: &TruncationPolicy) -> Result<f64> {
    Kernel::new(p, binning, policy)?.szsz()
}

/// `<Sx Sx>` evaluated at the given phase as-is.
pub fn sxsx_exact(p: &SqueezingParams, binning: &Binning, policy: &TruncationPolicy) -> Result<f64> {
    let k = Kernel::new(p, binning, policy)?;
    let (i13, i24) = k.transverse()?;
    Ok(k.pref * (i13 + i24))
}

/// `<Sy Sy>` evaluated at the given phase as-is.
pub fn sysy_exact(p: &SqueezingParams, binning: &Binning, policy: &TruncationPolicy) -> Result<f64> {
    let k = Kernel::new(p, binning, policy)?;
    let (i13, i24) = k.transverse()?;
    Ok(k.pref * (i24 - i13))
}

/// All three correlators at once, sharing the transverse integrals.
///
/// The phase is folded into `[0, pi/4]` first and the duality signs applied,
/// so the engines always run in the best-conditioned domain.
pub fn correlators(
    p: &SqueezingParams,
    binning: &Binning,
    policy: &TruncationPolicy,
) -> Result<CorrelatorTriple> {
    let rec = canonicalize_phi(p);
    let k = Kernel::new(&rec.params, binning, policy)?;
    let szsz = k.szsz()?;
    let (i13, i24) = k.transverse()?;
    Ok(CorrelatorTriple {
        szsz: rec.sz_sign * szsz,
        sxsx: rec.sx_sign * k.pref * (i13 + i24),
        sysy: rec.sy_sign * k.pref * (i24 - i13),
    })
}

/// `erf(a(z+q)) + erf(a(z-q))`, evaluated through complementary functions in
/// the tails so the near-cancellation of saturated terms never happens in
/// floating point.
fn window_bracket(a: f64, z: f64, q: f64) -> f64 {
    let qa = q.abs();
    if qa <= z {
        erf(a * (z + qa)) + erf(a * (z - qa))
    } else {
        erfc(a * (qa - z)) - erfc(a * (qa + z))
    }
}

/// Tilted analogue of [`window_bracket`] built from the scaled complex error
/// function `e^{-bb^2} erf(x + i bb)`.
fn tilted_bracket(a: f64, bb: f64, z: f64, q: f64) -> f64 {
    let qa = q.abs();
    if qa <= z {
        erf_scaled(a * (z + qa), bb).re + erf_scaled(a * (z - qa), bb).re
    } else {
        (erfc_scaled(a * (qa - z), bb) - erfc_scaled(a * (qa + z), bb)).re
    }
}

/// Contribution of the window pair `(n, m)` to the z-correlator sum.
///
/// `<Sz Sz>` equals `sqrt(gamma1 gamma2)/pi` times the alternating double sum
/// of these over all integer pairs. This is a diagnostic: the engine reaches
/// the same value through comb regrouping without ever forming the sum.
pub fn z_term(
    p: &SqueezingParams,
    binning: &Binning,
    policy: &TruncationPolicy,
    n: i64,
    m: i64,
) -> Result<f64> {
    let g = gamma_set(p)?;
    let ell = binning.ell;
    let b1 = g.gamma1 * ell * ell / 4.0;
    let a = ell * g.gamma2.sqrt() / 2.0;
    let pp = (n + m) as f64;
    let qq = (n - m) as f64;
    let f = |z: f64| -> Result<f64> {
        let w = z + pp;
        Ok((-b1 * w * w).exp() * window_bracket(a, z, qq))
    };
    let integral = integrate_uniform(f, 0.0, 1.0, 1, policy.quad_tol)?;
    Ok(0.5 * ell * (PI / g.gamma2).sqrt() * integral)
}

/// The four window-pair contributions to the transverse correlator sums.
///
/// `<Sx Sx>` equals `sqrt(gamma1 gamma2)/(2 pi)` times the double sum of
/// `X1+X2+X3+X4`; `<Sy Sy>` flips the signs of `X1` and `X3`. Diagnostic
/// only, like [`z_term`].
pub fn x_terms(
    p: &SqueezingParams,
    binning: &Binning,
    policy: &TruncationPolicy,
    n: i64,
    m: i64,
) -> Result<[f64; 4]> {
    let g = gamma_set(p)?;
    let ell = binning.ell;
    let b1 = g.gamma1 * ell * ell / 4.0;
    let a = ell * g.gamma2.sqrt() / 2.0;
    let a2 = a * a;
    let f3 = g.gamma3 * ell * ell;
    let bb = g.gamma4 * ell / g.gamma2.sqrt();
    let pp = (n + m) as f64;
    let qq = 2.0 * (n - m) as f64;
    let pan13 = oscillation_panels(f3);
    let pan24 = oscillation_panels(g.gamma4 * ell * ell);
    let pref = ell * (PI / g.gamma2).sqrt();

    let osc = |w: f64| (-b1 - b1 * w * w).exp() * (f3 * w).cos();
    let tilt = |w: f64| (-a2 - b1 * w * w).exp();

    let x1 = integrate_uniform(
        |z| Ok(osc(z + 2.0 * pp + 1.0) * window_bracket(a, z, qq)),
        0.0,
        1.0,
        pan13,
        policy.quad_tol,
    )?;
    let x3 = integrate_uniform(
        |z| Ok(osc(z - 2.0 * pp - 3.0) * window_bracket(a, z, qq)),
        0.0,
        1.0,
        pan13,
        policy.quad_tol,
    )?;
    let x2 = integrate_uniform(
        |z| Ok(tilt(z + 2.0 * pp + 1.0) * tilted_bracket(a, bb, z, qq)),
        0.0,
        1.0,
        pan24,
        policy.quad_tol,
    )?;
    let x4 = integrate_uniform(
        |z| Ok(tilt(z - 2.0 * pp - 3.0) * tilted_bracket(a, bb, z, qq)),
        0.0,
        1.0,
        pan24,
        policy.quad_tol,
    )?;
    Ok([pref * x1, pref * x2, pref * x3, pref * x4])
}
