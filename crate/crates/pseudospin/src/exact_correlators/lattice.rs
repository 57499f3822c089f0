//! Lattice-comb building blocks for the correlator integrands.
//!
//! Every correlator reduces to integrals over one bin of products of lattice
//! sums: Gaussian combs (from the state's density factors) and error-function
//! combs (from the sign-binned quadrature marginals). Each comb is evaluated
//! in whichever of two exact representations needs fewer terms:
//!
//! * direct: sum the terms themselves; cheap when they decay fast (wide
//!   lattice relative to the kernel width);
//! * dual: Poisson resummation; cheap in the opposite regime, where the
//!   direct sum would need thousands of near-unit terms and the dual needs
//!   a couple of Fourier modes.
//!
//! The crossover leaves at most a few dozen terms for any parameter set, so
//! a representation count exceeding the caller's cap signals a genuinely
//! unrepresentable request rather than a tuning problem.
//!
//! All sums here run over the plain lattice `period * Z`; alternating
//! variants weight terms by `(-1)^s`, which shifts the dual frequencies to
//! half-integers. Kernels are even or folded even, so sums are returned for
//! the symmetric lattice without offset.

use crate::error::{Error, Result};
use crate::special_functions::{erf, erf_scaled, erfc, erfc_scaled};

/// Decay collar: terms beyond `exp(-COLLAR)` of the peak are dropped.
/// exp(-40) ~ 4e-18 sits safely under every tolerance used downstream.
const COLLAR: f64 = 40.0;

fn sqrt_collar() -> f64 {
    COLLAR.sqrt()
}

fn cap_check(n_direct: f64, n_dual: f64, cap: usize, what: &str) -> Result<bool> {
    let n = n_direct.min(n_dual);
    if !n.is_finite() || n > cap as f64 {
        return Err(Error::TruncationNotConverged(format!(
            "{what} needs ~{n:.0} terms, cap is {cap}"
        )));
    }
    // true: direct representation is the cheaper one
    Ok(n_direct <= n_dual)
}

/// `sum_s exp(-b (u + period s)^2) cos(f (u + period s))`.
pub(crate) fn gcomb(b: f64, f: f64, period: f64, u: f64, cap: usize) -> Result<f64> {
    gcomb_impl(b, f, period, u, cap, false)
}

/// Alternating variant, terms weighted by `(-1)^s`.
pub(crate) fn gcomb_alt(b: f64, f: f64, period: f64, u: f64, cap: usize) -> Result<f64> {
    gcomb_impl(b, f, period, u, cap, true)
}

fn gcomb_impl(b: f64, f: f64, period: f64, u: f64, cap: usize, alternating: bool) -> Result<f64> {
    let l = period;
    let hw_direct = sqrt_collar() / b.sqrt() / l + 1.0;
    let hw_dual = l * (COLLAR * b).sqrt() / std::f64::consts::PI + 1.0;
    if cap_check(2.0 * hw_direct + 1.0, 2.0 * hw_dual + 1.0, cap, "gaussian comb")? {
        let center = -u / l;
        let lo = (center - hw_direct).ceil() as i64;
        let hi = (center + hw_direct).floor() as i64;
        let mut sum = 0.0;
        for s in lo..=hi {
            let x = u + l * s as f64;
            let mut term = (-b * x * x).exp() * (f * x).cos();
            if alternating && s.rem_euclid(2) == 1 {
                term = -term;
            }
            sum += term;
        }
        Ok(sum)
    } else {
        // Fourier side: one Gaussian hump at frequency f; the mirror hump is
        // recovered by taking the real part.
        let pref = (std::f64::consts::PI / b).sqrt() / l;
        let shift = if alternating { 0.5 } else { 0.0 };
        // nu_k = 2 pi (k + shift) / period, centered where nu ~ f.
        let center = f * l / (2.0 * std::f64::consts::PI) - shift;
        let lo = (center - hw_dual).ceil() as i64;
        let hi = (center + hw_dual).floor() as i64;
        let mut sum = 0.0;
        for k in lo..=hi {
            let kappa = k as f64 + shift;
            let nu = 2.0 * std::f64::consts::PI * kappa / l;
            let d = nu - f;
            sum += (-d * d / (4.0 * b)).exp() * (nu * u).cos();
        }
        Ok(pref * sum)
    }
}

/// `sum_{Q in period Z} [erf(a(z+Q)) + erf(a(z-Q))]`.
///
/// Each bracket vanishes as `|Q|` grows; the tail terms are evaluated as
/// complementary-function differences so no `1 - 1` cancellation occurs.
pub(crate) fn ecomb(a: f64, z: f64, period: f64, cap: usize) -> Result<f64> {
    ecomb_impl(a, z, period, cap, false)
}

/// Alternating variant, bracket at `Q = period * s` weighted by `(-1)^s`.
pub(crate) fn ecomb_alt(a: f64, z: f64, period: f64, cap: usize) -> Result<f64> {
    ecomb_impl(a, z, period, cap, true)
}

fn ecomb_impl(a: f64, z: f64, period: f64, cap: usize, alternating: bool) -> Result<f64> {
    let l = period;
    let n_direct = (sqrt_collar() / a + z.abs()) / l + 2.0;
    let n_dual = l * a * sqrt_collar() / std::f64::consts::PI + 2.0;
    if cap_check(n_direct, n_dual, cap, "erf comb")? {
        let mut sum = 2.0 * erf(a * z);
        let smax = n_direct.ceil() as i64;
        for s in 1..=smax {
            let q = l * s as f64;
            // erf(a(z+Q)) + erf(a(z-Q)) == erfc(a(Q-z)) - erfc(a(Q+z))
            let mut term = erfc(a * (q - z)) - erfc(a * (q + z));
            if alternating && s % 2 == 1 {
                term = -term;
            }
            sum += 2.0 * term;
        }
        Ok(sum)
    } else if !alternating {
        // Zero mode 4z/L plus sine modes at integer frequencies.
        let mut sum = 4.0 * z / l;
        let kmax = n_dual.ceil() as i64;
        for k in 1..=kmax {
            let kf = k as f64;
            let w = std::f64::consts::PI * kf / (l * a);
            sum += 4.0 / (std::f64::consts::PI * kf)
                * (2.0 * std::f64::consts::PI * kf * z / l).sin()
                * (-w * w).exp();
        }
        Ok(sum)
    } else {
        // Half-integer frequencies only; no zero mode survives.
        let mut sum = 0.0;
        let jmax = n_dual.ceil() as i64;
        for j in 0..=jmax {
            let odd = 2.0 * j as f64 + 1.0;
            let w = std::f64::consts::PI * odd / (2.0 * l * a);
            sum += 8.0 / (std::f64::consts::PI * odd)
                * (std::f64::consts::PI * odd * z / l).sin()
                * (-w * w).exp();
        }
        Ok(sum)
    }
}

/// `sum_{Q in period Z} [F(Q+z) - F(Q-z)]` with `F(t) = Re[e^{-bb^2} erf(at + i bb)]`.
///
/// The tilted analogue of [`ecomb`]: the scaled complex error function keeps
/// the `exp(-bb^2)` damping fused, and tail terms again telescope into
/// complementary differences.
pub(crate) fn e2comb(a: f64, bb: f64, z: f64, period: f64, cap: usize) -> Result<f64> {
    e2comb_impl(a, bb, z, period, cap, false)
}

/// Alternating variant of [`e2comb`].
pub(crate) fn e2comb_alt(a: f64, bb: f64, z: f64, period: f64, cap: usize) -> Result<f64> {
    e2comb_impl(a, bb, z, period, cap, true)
}

fn e2comb_impl(
    a: f64,
    bb: f64,
    z: f64,
    period: f64,
    cap: usize,
    alternating: bool,
) -> Result<f64> {
    let l = period;
    let n_direct = (sqrt_collar() / a + z.abs()) / l + 2.0;
    let n_dual = l * a * (bb.abs() + sqrt_collar()) / std::f64::consts::PI + 2.0;
    if cap_check(n_direct, n_dual, cap, "tilted erf comb")? {
        let mut sum = 2.0 * erf_scaled(a * z, bb).re;
        let smax = n_direct.ceil() as i64;
        for s in 1..=smax {
            let q = l * s as f64;
            let mut term = (erfc_scaled(a * (q - z), bb) - erfc_scaled(a * (q + z), bb)).re;
            if alternating && s % 2 == 1 {
                term = -term;
            }
            sum += 2.0 * term;
        }
        Ok(sum)
    } else {
        // H2(w) = (2 sin(wz)/w) [e^{-(w/2a - bb)^2} + e^{-(w/2a + bb)^2}];
        // plain lattice: zero mode H2(0)/L plus integer modes, alternating:
        // half-integer modes only.
        let h2 = |w: f64| {
            let u = w / (2.0 * a);
            let um = u - bb;
            let up = u + bb;
            2.0 * (w * z).sin() / w * ((-um * um).exp() + (-up * up).exp())
        };
        let kmax = n_dual.ceil() as i64;
        let mut sum;
        if !alternating {
            sum = 4.0 * z * (-bb * bb).exp() / l;
            for k in 1..=kmax {
                sum += 2.0 / l * h2(2.0 * std::f64::consts::PI * k as f64 / l);
            }
        } else {
            sum = 0.0;
            for j in 0..=kmax {
                let kappa = j as f64 + 0.5;
                sum += 2.0 / l * h2(2.0 * std::f64::consts::PI * kappa / l);
            }
        }
        Ok(sum)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CAP: usize = 1_000_000;

    /// Slow reference: direct summation with an oversized collar.
    fn gcomb_brute(b: f64, f: f64, l: f64, u: f64, alternating: bool) -> f64 {
        let hw = ((200.0 / b).sqrt() / l + 2.0) as i64;
        let center = (-u / l) as i64;
        let mut sum = 0.0;
        for s in (center - hw)..=(center + hw) {
            let x = u + l * s as f64;
            let mut t = (-b * x * x).exp() * (f * x).cos();
            if alternating && s.rem_euclid(2) == 1 {
                t = -t;
            }
            sum += t;
        }
        sum
    }

    fn ecomb_brute(a: f64, z: f64, l: f64, alternating: bool) -> f64 {
        let smax = ((200.0f64.sqrt() / a + z.abs()) / l + 2.0) as i64;
        let mut sum = 2.0 * erf(a * z);
        for s in 1..=smax {
            let q = l * s as f64;
            let mut t = erfc(a * (q - z)) - erfc(a * (q + z));
            if alternating && s % 2 == 1 {
                t = -t;
            }
            sum += 2.0 * t;
        }
        sum
    }

    fn e2comb_brute(a: f64, bb: f64, z: f64, l: f64, alternating: bool) -> f64 {
        let smax = ((200.0f64.sqrt() / a + z.abs()) / l + 2.0) as i64;
        let mut sum = 2.0 * erf_scaled(a * z, bb).re;
        for s in 1..=smax {
            let q = l * s as f64;
            let mut t = (erfc_scaled(a * (q - z), bb) - erfc_scaled(a * (q + z), bb)).re;
            if alternating && s % 2 == 1 {
                t = -t;
            }
            sum += 2.0 * t;
        }
        sum
    }

    #[test]
    fn gaussian_comb_representations_agree() {
        // Parameters straddling the direct/dual crossover; the brute sum is
        // the truth, and whichever branch was selected must match it.
        for &(b, f, l, u) in &[
            (0.05f64, 0.0, 1.0, 0.3),
            (0.05, 2.0, 1.0, 0.7),
            (0.5, 5.0, 2.0, 1.3),
            (4.0, 0.0, 1.0, 0.25),
            (30.0, 12.0, 2.0, 1.9),
            (0.004, 1.0, 2.0, 0.1),
        ] {
            for alt in [false, true] {
                let got = gcomb_impl(b, f, l, u, CAP, alt).unwrap();
                let want = gcomb_brute(b, f, l, u, alt);
                assert!(
                    (got - want).abs() < 1e-13 * want.abs().max(1.0),
                    "gcomb({b},{f},{l},{u},alt={alt}) = {got}, brute {want}"
                );
            }
        }
    }

    #[test]
    fn gaussian_comb_small_b_uses_dual_cheaply() {
        // Direct would need ~9000 terms here; the cap of 100 must still pass
        // because the dual needs only a handful.
        let v = gcomb(1e-6, 0.0, 1.0, 0.5, 100).unwrap();
        // sum_s exp(-1e-6 (0.5+s)^2) ~ sqrt(pi/b)
        let want = (std::f64::consts::PI / 1e-6).sqrt();
        assert!((v / want - 1.0).abs() < 1e-12);
    }

    #[test]
    fn erf_comb_representations_agree() {
        for &(a, z, l) in &[
            (0.08f64, 0.4, 1.0),
            (0.3, 0.9, 1.0),
            (1.0, 0.5, 2.0),
            (6.0, 0.2, 1.0),
            (25.0, 0.99, 2.0),
        ] {
            for alt in [false, true] {
                let got = ecomb_impl(a, z, l, CAP, alt).unwrap();
                let want = ecomb_brute(a, z, l, alt);
                assert!(
                    (got - want).abs() < 1e-13 * want.abs().max(1.0),
                    "ecomb({a},{z},{l},alt={alt}) = {got}, brute {want}"
                );
            }
        }
    }

    #[test]
    fn erf_comb_saturates_for_wide_kernels() {
        // a -> small: the plain comb approaches its zero mode 4z/L.
        let v = ecomb(1e-5, 0.3, 1.0, CAP).unwrap();
        assert!((v - 4.0 * 0.3).abs() < 1e-9, "{v}");
        // and the alternating comb collapses exponentially.
        let v = ecomb_alt(1e-5, 0.3, 1.0, CAP).unwrap();
        assert!(v.abs() < 1e-15, "{v}");
    }

    #[test]
    fn tilted_comb_representations_agree() {
        for &(a, bb, z, l) in &[
            (0.1f64, 0.0, 0.4, 2.0),
            (0.1, 2.0, 0.4, 2.0),
            (0.8, 1.5, 0.9, 2.0),
            (5.0, 0.3, 0.2, 2.0),
            (2.0, 4.0, 0.7, 1.0),
        ] {
            for alt in [false, true] {
                let got = e2comb_impl(a, bb, z, l, CAP, alt).unwrap();
                let want = e2comb_brute(a, bb, z, l, alt);
                assert!(
                    (got - want).abs() < 1e-12 * want.abs().max(1.0),
                    "e2comb({a},{bb},{z},{l},alt={alt}) = {got}, brute {want}"
                );
            }
        }
    }

    #[test]
    fn tilted_comb_reduces_to_plain_at_zero_tilt() {
        for &(a, z, l) in &[(0.3f64, 0.6, 2.0), (2.0, 0.3, 1.0)] {
            let plain = ecomb(a, z, l, CAP).unwrap();
            let tilted = e2comb(a, 0.0, z, l, CAP).unwrap();
            assert!((plain - tilted).abs() < 1e-13 * plain.abs().max(1.0));
            let plain = ecomb_alt(a, z, l, CAP).unwrap();
            let tilted = e2comb_alt(a, 0.0, z, l, CAP).unwrap();
            assert!((plain - tilted).abs() < 1e-13 * plain.abs().max(1.0));
        }
    }

    #[test]
    fn term_cap_is_enforced() {
        // Both representations need more than 3 terms here.
        assert!(matches!(
            gcomb(1.0, 0.0, 1.0, 0.5, 3),
            Err(Error::TruncationNotConverged(_))
        ));
        assert!(matches!(
            ecomb(1.0, 0.5, 1.0, 3),
            Err(Error::TruncationNotConverged(_))
        ));
        assert!(matches!(
            e2comb(1.0, 5.0, 0.5, 1.0, 3),
            Err(Error::TruncationNotConverged(_))
        ));
    }
}
