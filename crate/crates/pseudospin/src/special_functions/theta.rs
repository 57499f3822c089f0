//! Jacobi theta functions for nome in [0, 1).
//!
//! The defining q-series converge fast only while the nome stays away from 1.
//! The correlator assemblies push the nome arbitrarily close to 1 (lattice
//! spacing shrinking with the window width), where the series needs millions
//! of terms and, worse, alternating kinds lose all precision to cancellation:
//! theta4(0, e^(-0.01)) is about 1e-106 while individual series terms are of
//! order one. Past `a = -ln(nome) < pi` we therefore switch to the modular
//! (Poisson-resummed) Gaussian comb
//!
//! ```text
//! theta3(z, e^-a) = sqrt(pi/a) sum_p exp(-(z + pi p)^2 / a)
//! theta4(z, e^-a) = sqrt(pi/a) sum_p exp(-(z + (p + 1/2) pi)^2 / a)
//! theta2(z, e^-a) = sqrt(pi/a) sum_p (-1)^p exp(-(z + pi p)^2 / a)
//! ```
//!
//! whose terms are individually tiny whenever the sum is tiny, so the 1e-106
//! value above comes out to full relative precision from two terms.
//!
//! [`theta_scaled`] additionally fuses an external log-prefactor into every
//! term exponent, so products like `exp(L) * theta(...)` with large `|L|`
//! never materialize non-representable intermediates.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Which of the Jacobi theta functions to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThetaKind {
    Two,
    Three,
    Four,
}

/// q-series versus Gaussian-comb switch, on `a = -ln(nome)`.
const MODULAR_SWITCH: f64 = std::f64::consts::PI;
/// Largest real exponent any fused term may carry.
const EXP_LIMIT: f64 = 700.0;
/// Defensive bound on summation length; never reached for valid inputs.
const TERM_CAP: usize = 1_000_000;

fn check_nome(nome: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&nome) {
        return Err(Error::InvalidParameter(format!(
            "theta nome must lie in [0, 1), got {nome}"
        )));
    }
    Ok(-nome.ln())
}

/// Jacobi theta function of the given kind at complex `z` with real nome.
pub fn theta(kind: ThetaKind, z: Complex64, nome: f64) -> Result<Complex64> {
    let a = check_nome(nome)?;
    theta_with_log(kind, z, a, 0.0)
}

/// `exp(scale_log) * theta(kind, z, e^(-a))` with the scale fused into every
/// term, so the product is finite whenever the final value fits in an f64.
pub fn theta_scaled(kind: ThetaKind, z: Complex64, a: f64, scale_log: f64) -> Result<Complex64> {
    if !(a > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "theta log-nome must be positive, got {a}"
        )));
    }
    theta_with_log(kind, z, a, scale_log)
}

fn theta_with_log(kind: ThetaKind, z: Complex64, a: f64, ll: f64) -> Result<Complex64> {
    let peak = ll + z.im * z.im / a;
    if peak > EXP_LIMIT {
        return Err(Error::Overflow(format!(
            "theta term magnitude near exp({peak:.1}) exceeds f64 range"
        )));
    }
    if a >= MODULAR_SWITCH {
        theta_direct(kind, z, a, ll)
    } else {
        Ok(theta_modular(kind, z, a, ll))
    }
}

/// q-series with each `q^(p^2) cos(2pz)` split into two fused exponentials.
fn theta_direct(kind: ThetaKind, z: Complex64, a: f64, ll: f64) -> Result<Complex64> {
    let (x, y) = (z.re, z.im);
    let settle = y.abs() / a + 3.0;
    let half_shift = matches!(kind, ThetaKind::Two);
    let mut sum = if half_shift {
        Complex64::new(0.0, 0.0)
    } else {
        Complex64::new(ll.exp(), 0.0)
    };
    let mut peak = 0.0f64;
    for p in 0..TERM_CAP {
        let n = if half_shift {
            p as f64 + 0.5
        } else {
            (p + 1) as f64
        };
        // q^(n^2) cos(2nz) = (e^(-a n^2 + 2inz) + e^(-a n^2 - 2inz)) / 2,
        // with the 1/2 absorbed by summing both halves separately.
        let t1 = Complex64::new(ll - a * n * n - 2.0 * n * y, 2.0 * n * x).exp();
        let t2 = Complex64::new(ll - a * n * n + 2.0 * n * y, -2.0 * n * x).exp();
        let mut term = t1 + t2;
        if matches!(kind, ThetaKind::Four) && (p + 1) % 2 == 1 {
            term = -term;
        }
        sum += term;
        let m = t1.norm() + t2.norm();
        peak = peak.max(m);
        if n > settle && (m == 0.0 || m < 1e-17 * peak.max(sum.norm())) {
            return Ok(sum);
        }
    }
    Err(Error::TruncationNotConverged(
        "theta q-series failed to settle".into(),
    ))
}

/// Gaussian comb over the shifted lattice, exact by Poisson summation.
fn theta_modular(kind: ThetaKind, z: Complex64, a: f64, ll: f64) -> Complex64 {
    let (x, y) = (z.re, z.im);
    let pref_log = ll + 0.5 * (std::f64::consts::PI / a).ln();
    let half_shift = matches!(kind, ThetaKind::Four);
    let alternating = matches!(kind, ThetaKind::Two);
    // Terms die once (x + c)^2 - y^2 > 37 a; widen by |y| to cover the worst
    // placement and a couple of lattice steps of slack.
    let span = ((37.0 * a).sqrt() + y.abs()) / std::f64::consts::PI + 2.0;
    let center = -x / std::f64::consts::PI - if half_shift { 0.5 } else { 0.0 };
    let lo = (center - span).floor() as i64;
    let hi = (center + span).ceil() as i64;
    let mut sum = Complex64::new(0.0, 0.0);
    for p in lo..=hi {
        let c = (p as f64 + if half_shift { 0.5 } else { 0.0 }) * std::f64::consts::PI;
        let u = x + c;
        let re = pref_log - (u * u - y * y) / a;
        let im = -2.0 * u * y / a;
        let mut term = Complex64::new(re, im).exp();
        if alternating && p.rem_euclid(2) == 1 {
            term = -term;
        }
        sum += term;
    }
    sum
}

/// z-derivative of theta4 at real argument.
pub fn theta4_prime(z: f64, nome: f64) -> Result<f64> {
    let a = check_nome(nome)?;
    if a >= MODULAR_SWITCH {
        // -4 sum_{p>=1} (-1)^p p q^(p^2) sin(2pz)
        let mut sum = 0.0f64;
        for p in 1..TERM_CAP {
            let n = p as f64;
            let mag = n * (-a * n * n).exp();
            let term = -4.0 * mag * (2.0 * n * z).sin();
            sum += if p % 2 == 1 { -term } else { term };
            if mag < 1e-18 * (sum.abs() + 1.0) {
                return Ok(sum);
            }
        }
        Err(Error::TruncationNotConverged(
            "theta4' q-series failed to settle".into(),
        ))
    } else {
        // Term-wise derivative of the Gaussian comb.
        let pref = (std::f64::consts::PI / a).sqrt();
        let span = (37.0 * a).sqrt() / std::f64::consts::PI + 2.0;
        let center = -z / std::f64::consts::PI - 0.5;
        let lo = (center - span).floor() as i64;
        let hi = (center + span).ceil() as i64;
        let mut sum = 0.0f64;
        for p in lo..=hi {
            let u = z + (p as f64 + 0.5) * std::f64::consts::PI;
            sum += pref * (-2.0 * u / a) * (-u * u / a).exp();
        }
        Ok(sum)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(v: Result<Complex64>) -> f64 {
        let v = v.unwrap();
        assert!(v.im.abs() <= 1e-14 * v.re.abs().max(1e-280));
        v.re
    }

    fn rel(got: f64, want: f64) -> f64 {
        (got / want - 1.0).abs()
    }

    #[test]
    fn small_nome_direct_branch() {
        let z = Complex64::new(0.4, 0.0);
        assert!(rel(re(theta(ThetaKind::Three, z, 0.02)), 1.027_868_259_030_038_725_333_273) < 1e-14);
        assert!(rel(re(theta(ThetaKind::Two, z, 0.02)), 0.692_857_979_269_047_145_860_314_9) < 1e-14);
        let got = theta(ThetaKind::Four, Complex64::new(1.0, 0.5), 0.01).unwrap();
        let want = Complex64::new(
            1.012_842_913_311_606_101_615_884,
            0.021_372_203_323_995_697_036_733_07,
        );
        assert!((got - want).norm() < 1e-14 * want.norm());
        let got = theta(ThetaKind::Two, Complex64::new(0.2, -0.3), 0.03).unwrap();
        let want = Complex64::new(
            0.853_638_229_476_806_330_246_081_3,
            0.050_790_917_096_994_407_308_462_12,
        );
        assert!((got - want).norm() < 1e-14 * want.norm());
    }

    #[test]
    fn moderate_nome_modular_branch() {
        let z0 = Complex64::new(0.0, 0.0);
        let z3 = Complex64::new(0.3, 0.0);
        assert!(rel(re(theta(ThetaKind::Three, z0, 0.1)), 1.200_200_002_000_000_211_146_64) < 1e-14);
        assert!(rel(re(theta(ThetaKind::Two, z3, 0.2)), 1.311_005_733_617_499_806_334_88) < 1e-14);
        assert!(rel(re(theta(ThetaKind::Three, z3, 0.2)), 1.331_293_558_113_586_558_802_646) < 1e-14);
        assert!(rel(re(theta(ThetaKind::Four, z3, 0.2)), 0.671_025_531_495_733_819_057_397_8) < 1e-14);
        let got = theta(ThetaKind::Three, Complex64::new(0.5, 0.25), 0.3).unwrap();
        let want = Complex64::new(
            1.355_060_846_490_545_846_911_361,
            -0.280_415_193_380_441_160_152_452_1,
        );
        assert!((got - want).norm() < 1e-14 * want.norm());
        let got = theta(ThetaKind::Two, Complex64::new(1.2, -0.4), 0.15).unwrap();
        let want = Complex64::new(
            0.442_158_107_843_317_899_437_502_5,
            0.457_783_670_993_069_234_009_541_2,
        );
        assert!((got - want).norm() < 1e-14 * want.norm());
    }

    #[test]
    fn near_unit_nome_keeps_relative_precision() {
        // The headline case: the q-series loses ~106 digits to cancellation
        // here; the comb gets full precision from two Gaussians.
        let z0 = Complex64::new(0.0, 0.0);
        let got = re(theta(ThetaKind::Four, z0, (-0.01f64).exp()));
        assert!(rel(got, 2.464_544_606_498_872_419_207_845e-106) < 2e-11);
        let got = re(theta(ThetaKind::Three, z0, (-0.004f64).exp()));
        assert!(rel(got, 28.024_956_081_989_643_204_863_12) < 1e-13);
        let got = re(theta(ThetaKind::Two, z0, (-0.05f64).exp()));
        assert!(rel(got, 7.926_654_595_212_021_806_681_197) < 1e-13);
        let got = re(theta(
            ThetaKind::Three,
            Complex64::new(0.7, 0.0),
            (-0.02f64).exp(),
        ));
        assert!(rel(got, 2.869_757_052_751_496_252_338_89e-10) < 1e-11);
        let got = re(theta(
            ThetaKind::Four,
            Complex64::new(0.3, 0.0),
            (-0.02f64).exp(),
        ));
        assert!(rel(got, 1.072_620_154_450_133_570_486_273e-34) < 1e-11);
    }

    #[test]
    fn scaled_fuses_large_prefactors() {
        // exp(-250) * theta3(10i, e^-0.5); the unscaled theta is ~e^201.
        let got = theta_scaled(ThetaKind::Three, Complex64::new(0.0, 10.0), 0.5, -250.0).unwrap();
        assert!(rel(got.re, 4.834_658_929_464_809_581_286_499e-22) < 1e-12);
        assert!(got.im.abs() < 1e-15 * got.re);
        // Overflowing configuration is reported, not produced.
        assert!(matches!(
            theta_scaled(ThetaKind::Three, Complex64::new(0.0, 40.0), 0.5, -250.0),
            Err(Error::Overflow(_))
        ));
    }

    #[test]
    fn nome_domain_is_validated() {
        let z = Complex64::new(0.1, 0.0);
        assert!(matches!(
            theta(ThetaKind::Three, z, 1.0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            theta(ThetaKind::Three, z, -0.2),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            theta4_prime(0.1, f64::NAN),
            Err(Error::InvalidParameter(_))
        ));
        // nome = 0 degenerates smoothly.
        assert_eq!(re(theta(ThetaKind::Three, z, 0.0)), 1.0);
        assert_eq!(re(theta(ThetaKind::Four, z, 0.0)), 1.0);
        assert_eq!(re(theta(ThetaKind::Two, z, 0.0)), 0.0);
    }

    #[test]
    fn theta4_prime_reference_points() {
        assert!(rel(
            theta4_prime(0.3, 0.2).unwrap(),
            0.439_789_861_664_664_465_585_648_5
        ) < 1e-13);
        assert!(rel(
            theta4_prime(1.1, 0.95).unwrap(),
            1.908_397_033_876_249_509_605_25
        ) < 1e-12);
        // Modular-branch pair cancellation leaves rounding-level residue.
        assert!(theta4_prime(0.0, 0.5).unwrap().abs() < 1e-15);
        // Odd in z.
        let a = theta4_prime(0.4, 0.3).unwrap();
        let b = theta4_prime(-0.4, 0.3).unwrap();
        assert!((a + b).abs() < 1e-15 * a.abs());
    }

    #[test]
    fn branches_agree_near_switch() {
        // a slightly above and below pi must describe the same analytic
        // function; compare both evaluations of each against a trusted
        // finite difference of the defining series at a=pi +- 0.2.
        for &(kind, zx, zy) in &[
            (ThetaKind::Three, 0.37, 0.21),
            (ThetaKind::Four, 1.1, -0.4),
            (ThetaKind::Two, 0.8, 0.15),
        ] {
            let z = Complex64::new(zx, zy);
            let qd = (-(std::f64::consts::PI + 1e-9)).exp();
            let qm = (-(std::f64::consts::PI - 1e-9)).exp();
            let vd = theta(kind, z, qd).unwrap();
            let vm = theta(kind, z, qm).unwrap();
            // Values 2e-9 apart in a; the function varies smoothly, so the
            // two branches may differ only at the same order.
            assert!(
                (vd - vm).norm() < 1e-7 * vd.norm().max(1.0),
                "branch mismatch for {kind:?} at {z}: {vd} vs {vm}"
            );
        }
    }

    #[test]
    fn quasi_periodicity_in_pi() {
        // theta3(z + pi) = theta3(z); theta4(z + pi) = theta4(z);
        // theta2(z + pi) = -theta2(z).
        let z = Complex64::new(0.43, 0.12);
        let pi = std::f64::consts::PI;
        for &q in &[0.02, 0.3, 0.8] {
            let t3 = theta(ThetaKind::Three, z, q).unwrap();
            let t3s = theta(ThetaKind::Three, z + pi, q).unwrap();
            assert!((t3 - t3s).norm() < 1e-13 * t3.norm());
            let t2 = theta(ThetaKind::Two, z, q).unwrap();
            let t2s = theta(ThetaKind::Two, z + pi, q).unwrap();
            assert!((t2 + t2s).norm() < 1e-13 * t2.norm());
        }
    }
}
