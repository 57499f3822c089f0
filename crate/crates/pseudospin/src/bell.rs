//! CHSH Bell-operator evaluation on pseudo-spin correlators.
//!
//! Builds the two-sided correlation coefficient at analyzer angles, the
//! four-term CHSH combination under the standard and the optimal settings,
//! profiles of the Bell value over the bin width, extraction of the principal
//! maximum (the bump), and the violation threshold in the squeezing
//! amplitude.

use std::f64::consts::{PI, SQRT_2};

use crate::approx_correlators::{
    classify_regime, dual_saddle_triple, in_validity_domain, large_squeezing_triple,
    triple_approx, Regime,
};
use crate::error::{Error, Result};
use crate::exact_correlators::{correlators, Binning, CorrelatorTriple, TruncationPolicy};
use crate::squeezed_state::SqueezingParams;

/// Algebraic ceiling `2 sqrt(2)` on the CHSH combination.
pub const CIRELSON: f64 = 2.0 * SQRT_2;

/// Slack allowed above [`CIRELSON`] before a value is treated as clipped.
pub const CIRELSON_TOLERANCE: f64 = 5e-3;

/// Margin above the local-realism bound 2 that counts as a violation in
/// threshold and boundary searches; absorbs clamping noise near the bound.
pub const VIOLATION_EPSILON: f64 = 1e-3;

/// Analyzer angles for the CHSH combination; azimuthal angles are fixed to
/// zero so each setting is a single polar angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleConfig {
    pub theta_n: f64,
    pub theta_n_prime: f64,
    pub theta_m: f64,
    pub theta_m_prime: f64,
}

/// Angle convention for the Bell value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnglesMode {
    /// Fixed settings `(0, pi/2, pi/4, -pi/4)`.
    Standard,
    /// Settings tuned to the correlators, saturating `2 hypot(szsz, sxsx)`.
    Optimal,
}

impl AnglesMode {
    /// Stable label used in CSV and JSON output.
    pub fn label(self) -> &'static str {
        match self {
            AnglesMode::Standard => "standard",
            AnglesMode::Optimal => "optimal",
        }
    }
}

/// Correlator evaluation strategy for point, profile, and map drivers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    /// Pick per parameter set from the squeezing regime.
    Auto,
    /// Lattice-resummed engines; authoritative at any parameters.
    Exact,
    /// Theta-function approximation with the staircase transverse sum.
    Generic,
    /// Reduced deep-squeezing form driven by the exact widths.
    LargeSqueezing,
    /// Saturated conjugate-orientation limit.
    DualSaddle,
}

impl Backend {
    /// Resolve `Auto` to a concrete backend for the given parameters.
    pub fn resolve(self, p: &SqueezingParams) -> Backend {
        match self {
            Backend::Auto => match classify_regime(p) {
                Regime::Generic => Backend::Generic,
                Regime::LargeSqueezing => Backend::LargeSqueezing,
                Regime::DualSaddle => Backend::DualSaddle,
            },
            other => other,
        }
    }

    /// Stable label used in CSV and JSON output.
    pub fn label(self) -> &'static str {
        match self {
            Backend::Auto => "auto",
            Backend::Exact => "exact",
            Backend::Generic => "generic",
            Backend::LargeSqueezing => "large-squeezing",
            Backend::DualSaddle => "dual-saddle",
        }
    }

    /// Parse a CSV/CLI label back into a backend.
    pub fn parse(label: &str) -> Result<Backend> {
        match label {
            "auto" => Ok(Backend::Auto),
            "exact" => Ok(Backend::Exact),
            "generic" => Ok(Backend::Generic),
            "large-squeezing" => Ok(Backend::LargeSqueezing),
            "dual-saddle" => Ok(Backend::DualSaddle),
            other => Err(Error::InvalidParameter(format!(
                "unknown backend '{other}'"
            ))),
        }
    }
}

/// Per-point outcome flag for profiles and map cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quality {
    /// Value computed and inside the physical range.
    Good,
    /// Raw value exceeded the Cirel'son ceiling by more than the tolerance
    /// and was clipped to it.
    Clipped,
    /// Backend failed to converge; the value is a placeholder.
    Failed,
}

impl Quality {
    /// Stable label used in CSV and JSON output.
    pub fn label(self) -> &'static str {
        match self {
            Quality::Good => "ok",
            Quality::Clipped => "clipped",
            Quality::Failed => "failed",
        }
    }
}

/// Two-sided correlation coefficient at analyzer angles `theta_a`,
/// `theta_b`. The cross terms vanish by joint parity, so only the zz and xx
/// entries contribute.
pub fn correlation_e(triple: &CorrelatorTriple, theta_a: f64, theta_b: f64) -> f64 {
    theta_a.sin() * theta_b.sin() * triple.sxsx + theta_a.cos() * theta_b.cos() * triple.szsz
}

/// The standard CHSH settings `(0, pi/2, pi/4, -pi/4)`.
pub fn standard_angles() -> AngleConfig {
    AngleConfig {
        theta_n: 0.0,
        theta_n_prime: PI / 2.0,
        theta_m: PI / 4.0,
        theta_m_prime: -PI / 4.0,
    }
}

/// Settings maximizing the CHSH combination for the given correlators.
///
/// One side stays on the axes; the other tilts by the two-argument
/// arctangent of `(sxsx, szsz)`, the branch that realizes
/// `2 sqrt(szsz^2 + sxsx^2)` with a plus sign. A fully degenerate triple
/// (both entries zero, any angle optimal) falls back to the standard
/// settings.
pub fn optimal_angles(triple: &CorrelatorTriple) -> AngleConfig {
    if triple.szsz == 0.0 && triple.sxsx == 0.0 {
        return standard_angles();
    }
    let theta_m = triple.sxsx.atan2(triple.szsz);
    AngleConfig {
        theta_n: 0.0,
        theta_n_prime: PI / 2.0,
        theta_m,
        theta_m_prime: -theta_m,
    }
}

/// CHSH combination `E(n,m) + E(n,m') + E(n',m) - E(n',m')`.
pub fn bell_expectation(triple: &CorrelatorTriple, angles: &AngleConfig) -> f64 {
    correlation_e(triple, angles.theta_n, angles.theta_m)
        + correlation_e(triple, angles.theta_n, angles.theta_m_prime)
        + correlation_e(triple, angles.theta_n_prime, angles.theta_m)
        - correlation_e(triple, angles.theta_n_prime, angles.theta_m_prime)
}

/// Bell value for a triple under the chosen angle convention.
///
/// The optimal settings give `2 hypot(szsz, sxsx)` identically, so that
/// closed form is used directly.
pub fn bell_value(triple: &CorrelatorTriple, mode: AnglesMode) -> f64 {
    match mode {
        AnglesMode::Standard => bell_expectation(triple, &standard_angles()),
        AnglesMode::Optimal => 2.0 * triple.szsz.hypot(triple.sxsx),
    }
}

/// Correlator triple for a concrete (non-`Auto`) backend.
fn eval_concrete(
    p: &SqueezingParams,
    binning: &Binning,
    backend: Backend,
    policy: &TruncationPolicy,
) -> Result<CorrelatorTriple> {
    match backend {
        Backend::Exact => correlators(p, binning, policy),
        Backend::Generic => triple_approx(p, binning, None),
        Backend::LargeSqueezing => large_squeezing_triple(p, binning),
        Backend::DualSaddle => Ok(dual_saddle_triple()),
        Backend::Auto => Err(Error::InvalidParameter(
            "auto backend must be resolved before evaluation".into(),
        )),
    }
}

/// Correlator triple through the chosen backend.
///
/// `Auto` resolves from the squeezing regime; if that picks the generic
/// approximation at a bin width outside its trust region, the exact engine
/// is used instead so a point query never silently returns an extrapolated
/// value. Returns the triple together with the backend that produced it.
pub fn evaluate_triple(
    p: &SqueezingParams,
    binning: &Binning,
    backend: Backend,
    policy: &TruncationPolicy,
) -> Result<(CorrelatorTriple, Backend)> {
    let mut resolved = backend.resolve(p);
    if backend == Backend::Auto
        && resolved == Backend::Generic
        && !in_validity_domain(p, binning)?
    {
        resolved = Backend::Exact;
    }
    let triple = eval_concrete(p, binning, resolved, policy)?;
    Ok((triple, resolved))
}

/// One entry of a [`BellProfile`].
#[derive(Debug, Clone, Copy)]
pub struct ProfilePoint {
    pub log2_ell: f64,
    /// Bell value; NaN when `quality` is `Failed`.
    pub bell: f64,
    /// Backend that produced this point.
    pub backend: Backend,
    pub quality: Quality,
}

/// Bell value sampled over a range of bin widths.
#[derive(Debug, Clone)]
pub struct BellProfile {
    /// Points in strictly increasing `log2_ell` order.
    pub points: Vec<ProfilePoint>,
    pub angles: AnglesMode,
}

impl BellProfile {
    /// Largest finite Bell value and its location, if any point succeeded.
    pub fn max_point(&self) -> Option<(f64, f64)> {
        let mut best: Option<(f64, f64)> = None;
        for pt in &self.points {
            if pt.bell.is_finite() && best.map_or(true, |(_, b)| pt.bell > b) {
                best = Some((pt.log2_ell, pt.bell));
            }
        }
        best
    }
}

/// Validate a log2 bin-width sweep and return its grid.
fn log2_grid(range: (f64, f64), step: f64) -> Result<Vec<f64>> {
    let (lo, hi) = range;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::InvalidParameter(format!(
            "log2_ell range [{lo}, {hi}] must be finite and ordered"
        )));
    }
    if lo < -60.0 || hi > 60.0 {
        return Err(Error::InvalidParameter(
            "log2_ell outside [-60, 60] leaves the representable bin widths".into(),
        ));
    }
    if !(step.is_finite() && step > 1e-6) {
        return Err(Error::InvalidParameter(format!(
            "log2_ell step {step} must exceed 1e-6"
        )));
    }
    let n = ((hi - lo) / step).round() as usize + 1;
    if n > 1_000_000 {
        return Err(Error::InvalidParameter(
            "log2_ell sweep exceeds 1e6 points".into(),
        ));
    }
    Ok((0..n).map(|i| lo + step * i as f64).collect())
}

/// Bell value over a sweep of bin widths at fixed squeezing parameters.
///
/// Per-point backend failures are flagged (`Failed`, NaN value) rather than
/// aborting the sweep; raw values above the Cirel'son ceiling plus tolerance
/// are stored as the ceiling and flagged `Clipped`.
pub fn bell_profile(
    p: &SqueezingParams,
    log2_ell_range: (f64, f64),
    step: f64,
    backend: Backend,
    mode: AnglesMode,
    policy: &TruncationPolicy,
) -> Result<BellProfile> {
    let grid = log2_grid(log2_ell_range, step)?;
    let mut points = Vec::with_capacity(grid.len());
    for lg in grid {
        let binning = Binning::from_log2(lg)?;
        let (bell, used, quality) = match evaluate_triple(p, &binning, backend, policy) {
            Ok((triple, used)) => {
                let raw = bell_value(&triple, mode);
                if raw > CIRELSON + CIRELSON_TOLERANCE {
                    (CIRELSON, used, Quality::Clipped)
                } else {
                    (raw, used, Quality::Good)
                }
            }
            Err(_) => (f64::NAN, backend.resolve(p), Quality::Failed),
        };
        points.push(ProfilePoint {
            log2_ell: lg,
            bell,
            backend: used,
            quality,
        });
    }
    Ok(BellProfile {
        points,
        angles: mode,
    })
}

/// Principal maximum of the optimal-angle Bell value over the bin width.
#[derive(Debug, Clone, Copy)]
pub struct BumpMax {
    /// Location of the maximum in `log2(ell)`.
    pub log2_ell: f64,
    /// Bell value at the maximum, floored at 2 per the map convention.
    pub bell: f64,
    /// False when the maximum could not be bracketed away from a scan edge
    /// or a failed point, so the reported value is a lower bound.
    pub complete: bool,
}

const BUMP_LG_LO: f64 = -4.0;
const BUMP_LG_HI: f64 = 8.0;
const BUMP_STEP: f64 = 0.1;
const GOLDEN_TOL: f64 = 1e-4;
/// `(sqrt(5) - 1) / 2`, the golden-section interval ratio.
const INVPHI: f64 = 0.618_033_988_749_894_8;

/// Optimal-angle Bell value at one scan point, or None where the backend
/// fails or (for the generic approximation) the point sits outside the
/// approximation's trust region. Gating the generic backend keeps its
/// breakdown tail at large bin widths from fabricating spurious maxima in
/// scans; the honest divergence stays visible through `bell_profile`.
fn scan_value(
    p: &SqueezingParams,
    resolved: Backend,
    lg: f64,
    policy: &TruncationPolicy,
) -> Option<f64> {
    let binning = Binning::from_log2(lg).ok()?;
    if resolved == Backend::Generic && !in_validity_domain(p, &binning).ok()? {
        return None;
    }
    let triple = eval_concrete(p, &binning, resolved, policy).ok()?;
    Some(bell_value(&triple, AnglesMode::Optimal))
}

/// Golden-section maximization of `f` on `[a, b]` to width `tol`.
fn golden_max(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INVPHI * (b - a);
    let mut d = a + INVPHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INVPHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INVPHI * (b - a);
            fd = f(d);
        }
    }
    let m = 0.5 * (a + b);
    (m, f(m))
}

/// What a scan over bin widths extracts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum ScanRule {
    /// First interior local maximum from the small-width side: the bump.
    Bump,
    /// Global maximum over the window: also catches isolated features.
    Global,
}

/// Bump search over a caller-chosen window; see [`find_bump_max`] for the
/// default window. Exposed within the crate so sweep drivers can match the
/// window to the regime (the collapse curve needs the left edge at
/// `log2(ell) = -6` to keep the maximum interior as the collapse coordinate
/// shrinks) and pick the extraction rule.
pub(crate) fn bump_max_in(
    p: &SqueezingParams,
    backend: Backend,
    policy: &TruncationPolicy,
    lg_lo: f64,
    lg_hi: f64,
    step: f64,
    rule: ScanRule,
) -> Result<BumpMax> {
    let resolved = backend.resolve(p);
    let grid = log2_grid((lg_lo, lg_hi), step)?;
    let vals: Vec<Option<f64>> = grid
        .iter()
        .map(|&lg| scan_value(p, resolved, lg, policy))
        .collect();

    // The bump is the first interior local maximum coming from small bin
    // widths; later maxima are features and are deliberately not taken.
    // The left comparison is strict: the small-width side of the profile
    // can sit at exactly 2 over many grid points, and a tied plateau must
    // not read as a maximum.
    let mut bracket: Option<(usize, bool)> = None;
    if rule == ScanRule::Bump {
        for i in 1..grid.len().saturating_sub(1) {
            if let (Some(vm), Some(v), Some(vp)) = (vals[i - 1], vals[i], vals[i + 1]) {
                if v > vm && v >= vp {
                    bracket = Some((i, true));
                    break;
                }
            }
        }
    }
    // Global rule, or fallback when no interior bump exists: the grid
    // argmax. Complete only when both neighbors were evaluable, so an
    // edge-touching maximum reads as a lower bound.
    if bracket.is_none() {
        let mut best: Option<(usize, f64)> = None;
        for (i, v) in vals.iter().enumerate() {
            if let Some(v) = *v {
                if best.map_or(true, |(_, b)| v > b) {
                    best = Some((i, v));
                }
            }
        }
        let (i, _) = best.ok_or_else(|| {
            Error::TruncationNotConverged(
                "no evaluable points in the bump scan window".into(),
            )
        })?;
        let interior = i > 0
            && i + 1 < grid.len()
            && vals[i - 1].is_some()
            && vals[i + 1].is_some();
        bracket = Some((i, rule == ScanRule::Global && interior));
    }
    let (i, complete) = bracket.unwrap();
    let lo = grid[i.saturating_sub(1)];
    let hi = grid[(i + 1).min(grid.len() - 1)];
    let f = |lg: f64| scan_value(p, resolved, lg, policy).unwrap_or(f64::NEG_INFINITY);
    let (lg_star, v_star) = golden_max(&f, lo, hi, GOLDEN_TOL);
    // A grid point can beat the refined midpoint when the window collapsed
    // onto an edge; keep the better of the two.
    let (lg_star, v_star) = if vals[i].unwrap_or(f64::NEG_INFINITY) > v_star {
        (grid[i], vals[i].unwrap())
    } else {
        (lg_star, v_star)
    };
    Ok(BumpMax {
        log2_ell: lg_star,
        bell: v_star.max(2.0),
        complete,
    })
}

/// Locate the principal maximum (the bump) of the optimal-angle Bell value
/// over `log2(ell) in [-4, 8]`.
///
/// Coarse scan at step 0.1, restricted to the first interior local maximum
/// (the bump; later local maxima are features), then golden-section
/// refinement to 1e-4 in `log2(ell)`. The returned value is floored at 2,
/// the convention used by the violation map for non-violating parameters.
pub fn find_bump_max(
    p: &SqueezingParams,
    backend: Backend,
    policy: &TruncationPolicy,
) -> Result<BumpMax> {
    bump_max_in(
        p,
        backend,
        policy,
        BUMP_LG_LO,
        BUMP_LG_HI,
        BUMP_STEP,
        ScanRule::Bump,
    )
}

/// Global maximum of the optimal-angle Bell value over the standard scan
/// window, including feature-driven maxima that [`find_bump_max`] skips.
pub fn find_profile_max(
    p: &SqueezingParams,
    backend: Backend,
    policy: &TruncationPolicy,
) -> Result<BumpMax> {
    bump_max_in(
        p,
        backend,
        policy,
        BUMP_LG_LO,
        BUMP_LG_HI,
        BUMP_STEP,
        ScanRule::Global,
    )
}

/// Squeezing-amplitude threshold above which the bump violates the Bell
/// inequality at fixed phase, to 0.01 in `r`; `None` when no `r <= 10`
/// violates.
///
/// Sweeps `r` in steps of 0.5 and bisects the first bracketing pair on the
/// predicate `bump > 2 + epsilon`.
pub fn threshold_r(
    phi: f64,
    backend: Backend,
    policy: &TruncationPolicy,
) -> Result<Option<f64>> {
    if !(0.0..=PI / 4.0).contains(&phi) {
        return Err(Error::InvalidParameter(format!(
            "threshold phase {phi} outside [0, pi/4]"
        )));
    }
    let violated = |r: f64| -> Result<bool> {
        let p = SqueezingParams::new(r, phi)?;
        match find_bump_max(&p, backend, policy) {
            Ok(b) => Ok(b.bell > 2.0 + VIOLATION_EPSILON),
            // An unevaluable profile demonstrates no violation; the sweep
            // moves on rather than aborting the search.
            Err(_) => Ok(false),
        }
    };
    let mut lo = 0.0;
    let mut hi = None;
    let mut r = 0.5;
    while r <= 10.0 + 1e-9 {
        if violated(r)? {
            hi = Some(r);
            break;
        }
        lo = r;
        r += 0.5;
    }
    let Some(mut hi) = hi else {
        return Ok(None);
    };
    while hi - lo > 0.01 {
        let mid = 0.5 * (lo + hi);
        if violated(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn triple(szsz: f64, sxsx: f64, sysy: f64) -> CorrelatorTriple {
        CorrelatorTriple { szsz, sxsx, sysy }
    }

    fn params(r: f64, phi: f64) -> SqueezingParams {
        SqueezingParams::new(r, phi).unwrap()
    }

    #[test]
    fn correlation_axes() {
        let t = triple(0.9, 0.8, -0.1);
        assert_abs_diff_eq!(correlation_e(&t, 0.0, 0.0), 0.9, epsilon = 1e-15);
        assert_abs_diff_eq!(
            correlation_e(&t, PI / 2.0, PI / 2.0),
            0.8,
            epsilon = 1e-15
        );
        // Mixed axes see only the vanishing cross correlators.
        assert_abs_diff_eq!(correlation_e(&t, 0.0, PI / 2.0), 0.0, epsilon = 1e-16);
        assert_abs_diff_eq!(
            correlation_e(&t, 0.0, PI / 4.0),
            0.636_396_103_067_892_8,
            epsilon = 1e-15
        );
    }

    #[test]
    fn standard_combination() {
        let cfg = standard_angles();
        assert_eq!(cfg.theta_n, 0.0);
        assert_eq!(cfg.theta_n_prime, PI / 2.0);
        assert_eq!(cfg.theta_m, PI / 4.0);
        assert_eq!(cfg.theta_m_prime, -PI / 4.0);
        // Standard angles give sqrt(2) (szsz + sxsx).
        assert_abs_diff_eq!(
            bell_expectation(&triple(1.0, 1.0, 0.0), &cfg),
            CIRELSON,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            bell_expectation(&triple(1.0, 0.0, 0.0), &cfg),
            SQRT_2,
            epsilon = 1e-14
        );
    }

    #[test]
    fn optimal_combination() {
        let t = triple(0.6, 0.8, 0.0);
        let cfg = optimal_angles(&t);
        assert_abs_diff_eq!(cfg.theta_m, 0.927_295_218_001_612_2, epsilon = 1e-15);
        assert_abs_diff_eq!(bell_expectation(&t, &cfg), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            bell_value(&t, AnglesMode::Optimal),
            2.0,
            epsilon = 1e-12
        );
        // Axis-aligned triples tilt by zero or pi.
        assert_eq!(optimal_angles(&triple(0.5, 0.0, 0.0)).theta_m, 0.0);
        assert_abs_diff_eq!(
            optimal_angles(&triple(-0.5, 0.0, 0.0)).theta_m,
            PI,
            epsilon = 1e-15
        );
        // Degenerate input falls back to the standard settings.
        assert_eq!(optimal_angles(&triple(0.0, 0.0, 0.0)), standard_angles());
    }

    #[test]
    fn optimal_identity_and_local_maximality() {
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            // Splitmix step; plenty for test fodder.
            state = state.wrapping_add(0x9e3779b97f4a7c15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            (z ^ (z >> 31)) as f64 / u64::MAX as f64 * 2.0 - 1.0
        };
        for _ in 0..200 {
            let t = triple(next(), next(), next());
            let cfg = optimal_angles(&t);
            let ident = 2.0 * (t.szsz * t.szsz + t.sxsx * t.sxsx).sqrt();
            assert_abs_diff_eq!(bell_expectation(&t, &cfg), ident, epsilon = 1e-12);
            assert!(bell_expectation(&t, &cfg) >= bell_expectation(&t, &standard_angles()) - 1e-12);
            for delta in [-0.01, 0.01] {
                let perturbed = AngleConfig {
                    theta_m: cfg.theta_m + delta,
                    theta_m_prime: -(cfg.theta_m + delta),
                    ..cfg
                };
                assert!(bell_expectation(&t, &perturbed) <= ident + 1e-12);
            }
        }
    }

    #[test]
    fn backend_labels_round_trip() {
        for be in [
            Backend::Auto,
            Backend::Exact,
            Backend::Generic,
            Backend::LargeSqueezing,
            Backend::DualSaddle,
        ] {
            assert_eq!(Backend::parse(be.label()).unwrap(), be);
        }
        assert!(Backend::parse("fancy").is_err());
    }

    #[test]
    fn auto_resolution_follows_regime() {
        assert_eq!(Backend::Auto.resolve(&params(1.0, 0.1)), Backend::Generic);
        assert_eq!(
            Backend::Auto.resolve(&params(4.0, 0.01)),
            Backend::LargeSqueezing
        );
        assert_eq!(Backend::Exact.resolve(&params(1.0, 0.1)), Backend::Exact);
    }

    #[test]
    fn auto_point_query_falls_back_to_exact_outside_trust_region() {
        let p = params(0.5, PI / 4.0);
        let policy = TruncationPolicy::default();
        let wide = Binning::from_log2(2.0).unwrap();
        let (_, used) = evaluate_triple(&p, &wide, Backend::Auto, &policy).unwrap();
        assert_eq!(used, Backend::Exact);
        let narrow = Binning::from_log2(-2.0).unwrap();
        let (_, used) = evaluate_triple(&p, &narrow, Backend::Auto, &policy).unwrap();
        assert_eq!(used, Backend::Generic);
    }

    #[test]
    fn profile_matches_plateaus() {
        let policy = TruncationPolicy::default();
        let profile = bell_profile(
            &params(2.0, 0.0),
            (-7.0, 6.0),
            0.5,
            Backend::Exact,
            AnglesMode::Optimal,
            &policy,
        )
        .unwrap();
        assert_eq!(profile.points.len(), 27);
        let first = profile.points.first().unwrap();
        let last = profile.points.last().unwrap();
        // The transverse correlators approach 1 only linearly in ell, so the
        // small-width plateau needs a few more octaves down at r = 2.
        assert!((first.bell - 2.0).abs() < 0.025, "first {}", first.bell);
        assert!((last.bell - 1.953_364_822_879_49).abs() < 0.01);
        let (_, max) = profile.max_point().unwrap();
        assert!(max > 2.0);
        for pt in &profile.points {
            assert_eq!(pt.quality, Quality::Good);
            assert!(pt.bell <= CIRELSON + CIRELSON_TOLERANCE);
        }
    }

    #[test]
    fn profile_invariant_under_phase_duality() {
        let policy = TruncationPolicy::default();
        let run = |phi: f64| {
            bell_profile(
                &params(2.0, phi),
                (-2.0, 3.0),
                0.5,
                Backend::Exact,
                AnglesMode::Optimal,
                &policy,
            )
            .unwrap()
        };
        let a = run(PI / 6.0);
        let b = run(PI / 3.0);
        let c = run(PI / 6.0 + PI);
        for ((pa, pb), pc) in a.points.iter().zip(&b.points).zip(&c.points) {
            assert_abs_diff_eq!(pa.bell, pb.bell, epsilon = 1e-8);
            assert_abs_diff_eq!(pa.bell, pc.bell, epsilon = 1e-7);
        }
    }

    #[test]
    fn bump_anchor_exact() {
        let policy = TruncationPolicy::default();
        let bump = find_bump_max(&params(2.0, 0.0), Backend::Exact, &policy).unwrap();
        assert!(bump.complete);
        assert_abs_diff_eq!(bump.bell, 2.571_112, epsilon = 1e-5);
        assert_abs_diff_eq!(bump.log2_ell, 1.4226, epsilon = 1e-3);
    }

    #[test]
    fn bump_anchor_generic() {
        let policy = TruncationPolicy::default();
        let bump = find_bump_max(&params(2.0, 0.0), Backend::Generic, &policy).unwrap();
        assert!(bump.complete);
        assert_abs_diff_eq!(bump.bell, 2.571_260, epsilon = 1e-5);
        assert_abs_diff_eq!(bump.log2_ell, 1.4306, epsilon = 1e-3);
    }

    #[test]
    fn bump_below_threshold_clamps_to_two() {
        let policy = TruncationPolicy::default();
        let bump = find_bump_max(&params(0.5, 0.0), Backend::Exact, &policy).unwrap();
        assert_eq!(bump.bell, 2.0);
    }

    #[test]
    fn bump_grows_toward_ceiling_as_collapse_coordinate_shrinks() {
        let policy = TruncationPolicy::default();
        // e^r phi = 0.109, well inside the violating side of the collapse.
        let bump = find_bump_max(&params(4.0, 0.002), Backend::Auto, &policy).unwrap();
        assert!(bump.complete);
        assert!(bump.bell > 2.4 && bump.bell < 2.80, "bell {}", bump.bell);
    }

    #[test]
    fn bump_skips_feature_but_global_max_sees_it() {
        let policy = TruncationPolicy::default();
        let p = params(3.0, 0.02);
        let bump = find_bump_max(&p, Backend::Exact, &policy).unwrap();
        assert_eq!(bump.bell, 2.0, "bump should clamp below threshold");
        let full = find_profile_max(&p, Backend::Exact, &policy).unwrap();
        assert!(
            full.bell > 2.0 + VIOLATION_EPSILON,
            "feature not seen, max {}",
            full.bell
        );
        assert!(full.log2_ell > bump.log2_ell);
    }

    #[test]
    fn threshold_at_zero_phase() {
        let policy = TruncationPolicy::default();
        let thr = threshold_r(0.0, Backend::Exact, &policy).unwrap().unwrap();
        assert!((thr - 1.1363).abs() < 0.015, "threshold {thr}");
    }

    #[test]
    fn threshold_none_at_duality_fixed_point() {
        let policy = TruncationPolicy::default();
        let thr = threshold_r(PI / 4.0, Backend::Auto, &policy).unwrap();
        assert_eq!(thr, None);
    }
}
