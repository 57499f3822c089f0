//! Faddeeva function and scaled complex error functions.
//!
//! The correlator engines never need `erf(x+ib)` itself, which grows like
//! `exp(b^2)`; they need `exp(-b^2) erf(x+ib)` and `exp(-b^2) erfc(x+ib)`,
//! which stay bounded for every real `x`, `b`. Both reduce to the Faddeeva
//! function `w(z) = exp(-z^2) erfc(-iz)` evaluated in the upper half-plane:
//!
//! ```text
//! exp(-b^2) erfc(x+ib) = exp(-x^2) exp(-2ixb) w(-b+ix)      (x >= 0)
//! ```
//!
//! `w` itself is computed two ways. Away from the origin (`|Re z| + Im z >= 8`)
//! the Laplace continued fraction converges in a couple dozen levels. Closer in
//! we use the half-unit trapezoidal expansion of the error function of complex
//! argument, with every exponential fused so each summand's exponent is
//! nonpositive: `exp(-xi^2) exp(-k^2/4) cosh(k xi)` becomes
//! `(exp(-(k/2-xi)^2) + exp(-(k/2+xi)^2)) / 2`, which cannot overflow no
//! matter how large `xi` gets. The expansion's intrinsic error is below 1e-15
//! in the region where it is used.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special_functions::erf::erfcx;

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_286_95;
const FRAC_2_SQRT_PI: f64 = 1.128_379_167_095_512_573_9;

/// Continued-fraction levels: generous for the near boundary, short far out.
const CF_DEPTH_NEAR: usize = 24;
const CF_DEPTH_FAR: usize = 11;
/// Series/continued-fraction switch on |Re z| + Im z.
const CF_BOUNDARY: f64 = 8.0;
/// Maclaurin region for erf of complex argument: |z| <= this.
const MACLAURIN_RADIUS: f64 = 2.5;

/// Laplace continued fraction for w, valid well away from the origin.
fn w_continued_fraction(z: Complex64, depth: usize) -> Complex64 {
    let mut t = z;
    for k in (1..=depth).rev() {
        t = z - (0.5 * k as f64) / t;
    }
    Complex64::new(0.0, FRAC_1_SQRT_PI) / t
}

/// Trapezoidal expansion for w(xi + i eta), xi >= 0, eta >= 0, xi + eta < 8.
fn w_series(xi: f64, eta: f64) -> Complex64 {
    // Phase common to every piece.
    let phase = Complex64::from_polar(1.0, -2.0 * xi * eta);
    let exp_mxi2 = (-xi * xi).exp();

    // exp(-z^2) erfc(eta) with the growing exponential absorbed into erfcx.
    let term1 = phase * (exp_mxi2 * erfcx(eta));

    // Middle term; its eta -> 0 limit is -i xi exp(-xi^2) / pi.
    let term2 = if eta == 0.0 {
        Complex64::new(0.0, -xi * exp_mxi2 / std::f64::consts::PI)
    } else {
        let s = (xi * eta).sin();
        let re = 2.0 * s * s; // 1 - cos(2 xi eta), cancellation-free
        let im = -(2.0 * xi * eta).sin();
        phase * Complex64::new(re, im) * (exp_mxi2 / (2.0 * std::f64::consts::PI * eta))
    };

    // Lattice sum with fused exponentials.
    let cos2 = (2.0 * xi * eta).cos();
    let sin2 = (2.0 * xi * eta).sin();
    let kmax = (2.0 * xi).ceil() as usize + 14;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 1..=kmax {
        let kf = k as f64;
        let half = 0.5 * kf;
        let em = (-(half - xi) * (half - xi)).exp();
        let ep = (-(half + xi) * (half + xi)).exp();
        let ck = 0.5 * (em + ep);
        let sk = 0.5 * (em - ep);
        let ek = (-(xi * xi + 0.25 * kf * kf)).exp();
        let f = 2.0 * eta * ek - 2.0 * eta * ck * cos2 + kf * sk * sin2;
        let g = -(2.0 * eta * ck * sin2 + kf * sk * cos2);
        let denom = kf * kf + 4.0 * eta * eta;
        sum += Complex64::new(f / denom, g / denom);
    }
    let term3 = phase * sum * (2.0 / std::f64::consts::PI);

    term1 - term2 - term3
}

/// Faddeeva function `w(z) = exp(-z^2) erfc(-iz)`.
///
/// Accurate for `Im z >= 0` (the only regime the rest of the crate uses),
/// where `|w(z)| <= 1`. For `Im z < 0` the reflection
/// `w(z) = 2 exp(-z^2) - w(-z)` is applied; it overflows once
/// `Im(z)^2 - Re(z)^2` exceeds the f64 exponent range.
pub fn faddeeva_w(z: Complex64) -> Complex64 {
    if z.im < 0.0 {
        let e = (-z * z).exp();
        return 2.0 * e - faddeeva_w(-z);
    }
    // w(-conj z) = conj(w(z)) folds Re z >= 0.
    if z.re < 0.0 {
        return faddeeva_w(Complex64::new(-z.re, z.im)).conj();
    }
    let s = z.re + z.im;
    if s >= CF_BOUNDARY {
        let depth = if s >= 15.0 { CF_DEPTH_FAR } else { CF_DEPTH_NEAR };
        w_continued_fraction(z, depth)
    } else {
        w_series(z.re, z.im)
    }
}

/// Maclaurin series of erf(z), reliable for |z| <= 2.5.
fn erf_maclaurin(z: Complex64) -> Complex64 {
    let mz2 = -z * z;
    let mut term = z;
    let mut acc = z;
    for k in 1..80 {
        term *= mz2 / k as f64;
        let contrib = term / (2 * k + 1) as f64;
        acc += contrib;
        if contrib.norm_sqr() < 1e-36 * acc.norm_sqr() {
            break;
        }
    }
    acc * FRAC_2_SQRT_PI
}

/// Scaled complementary error function `exp(-b^2) erfc(x + ib)`.
///
/// Bounded for all real `x`, `b`; underflows to zero once `x` is so large that
/// the true magnitude drops below f64 range (x above roughly 27 with the
/// result's magnitude near `exp(-x^2)`).
pub fn erfc_scaled(x: f64, b: f64) -> Complex64 {
    if x < 0.0 {
        // erfc(-u) = 2 - erfc(u), taken at u = -x - ib.
        let t = erfc_scaled(-x, -b);
        return Complex64::new(2.0 * (-b * b).exp() - t.re, -t.im);
    }
    let w = faddeeva_w(Complex64::new(-b, x));
    let phase = Complex64::from_polar(1.0, -2.0 * x * b);
    ((-x * x).exp()) * phase * w
}

/// Scaled error function `exp(-b^2) erf(x + ib)`.
///
/// Bounded for all real `x`, `b`, unlike `erf(x + ib)` itself which grows as
/// `exp(b^2)`. Relative accuracy is 1e-12 or better away from the complex
/// zeros of erf, absolute accuracy ~1e-12 near them.
pub fn erf_scaled(x: f64, b: f64) -> Complex64 {
    if x < 0.0 {
        // erf(-u+ib) = -erf(u-ib) = -conj(erf(u+ib)).
        return -erf_scaled(-x, b).conj();
    }
    if b < 0.0 {
        return erf_scaled(x, -b).conj();
    }
    if x * x + b * b <= MACLAURIN_RADIUS * MACLAURIN_RADIUS {
        return (-b * b).exp() * erf_maclaurin(Complex64::new(x, b));
    }
    Complex64::new((-b * b).exp(), 0.0) - erfc_scaled(x, b)
}

/// Error function of a complex argument.
///
/// Returns an overflow error when `Im(z)^2 - Re(z)^2` exceeds the f64
/// exponent range, in which case the magnitude of erf itself is not
/// representable and [`erf_scaled`] must be used instead.
pub fn erf_complex(z: Complex64) -> Result<Complex64> {
    if z.re < 0.0 {
        return erf_complex(-z).map(|v| -v);
    }
    if z.im < 0.0 {
        return erf_complex(z.conj()).map(|v| v.conj());
    }
    if z.norm_sqr() <= MACLAURIN_RADIUS * MACLAURIN_RADIUS {
        return Ok(erf_maclaurin(z));
    }
    let grow = z.im * z.im - z.re * z.re;
    if grow > 705.0 {
        return Err(Error::Overflow(format!(
            "erf({z}) magnitude near exp({grow:.1}) exceeds f64 range; use erf_scaled"
        )));
    }
    // erf(z) = 1 - exp(-z^2) w(iz); iz lies in the upper half-plane here.
    let e = (-z * z).exp();
    let w = faddeeva_w(Complex64::new(-z.im, z.re));
    Ok(Complex64::new(1.0, 0.0) - e * w)
}
