//! Parameter-space sweeps: the (r, phi) violation map, the e^r phi collapse
//! curve, and extraction of the violation boundary from a computed map.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::bell::{
    bump_max_in, find_bump_max, find_profile_max, Backend, BumpMax, Quality, CIRELSON,
    CIRELSON_TOLERANCE, VIOLATION_EPSILON,
};
use crate::error::{Error, Result};
use crate::exact_correlators::TruncationPolicy;
use crate::squeezed_state::SqueezingParams;

/// Per-cell extraction rule for a violation map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapMode {
    /// Record the principal-maximum (bump) value; the paper's convention.
    /// Provides a sufficient but not necessary violation witness.
    Bump,
    /// Record the global profile maximum, which also catches feature-driven
    /// violations; slower in the sense of never stopping at the first bump.
    Full,
}

impl MapMode {
    /// Stable label used in CSV and JSON output.
    pub fn label(self) -> &'static str {
        match self {
            MapMode::Bump => "bump",
            MapMode::Full => "full",
        }
    }

    /// Parse a CSV/CLI label back into a mode.
    pub fn parse(label: &str) -> Result<MapMode> {
        match label {
            "bump" => Ok(MapMode::Bump),
            "full" => Ok(MapMode::Full),
            other => Err(Error::InvalidParameter(format!(
                "unknown map mode '{other}'"
            ))),
        }
    }
}

/// Maximum Bell value over the bin width on an (r, phi) grid.
///
/// `values` is row-major with `r` as the slow axis: the cell at
/// `(r_axis[i], phi_axis[j])` sits at index `i * phi_axis.len() + j`.
/// Values are clamped to `[2, 2 sqrt 2]`; the `quality` matrix records
/// cells whose raw value was clipped from above or whose backend failed.
#[derive(Debug, Clone)]
pub struct ViolationMap {
    pub r_axis: Vec<f64>,
    pub phi_axis: Vec<f64>,
    pub values: Vec<f64>,
    pub backend: Vec<Backend>,
    pub quality: Vec<Quality>,
    pub mode: MapMode,
    /// Backend selection the map was requested with, before per-cell
    /// resolution; boundary refinement reuses it.
    pub requested_backend: Backend,
}

impl ViolationMap {
    /// Value at grid indices `(i_r, i_phi)`.
    pub fn value(&self, i_r: usize, i_phi: usize) -> f64 {
        self.values[i_r * self.phi_axis.len() + i_phi]
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| lo + step * i as f64).collect()
}

/// One cell of the map: extract, clamp, and flag.
fn map_cell(
    r: f64,
    phi: f64,
    backend: Backend,
    mode: MapMode,
    policy: &TruncationPolicy,
) -> (f64, Backend, Quality) {
    let p = match SqueezingParams::new(r, phi) {
        Ok(p) => p,
        Err(_) => return (2.0, backend, Quality::Failed),
    };
    let resolved = backend.resolve(&p);
    let extremum: Result<BumpMax> = match mode {
        MapMode::Bump => find_bump_max(&p, backend, policy),
        MapMode::Full => find_profile_max(&p, backend, policy),
    };
    match extremum {
        Ok(b) => {
            if b.bell > CIRELSON + CIRELSON_TOLERANCE {
                (CIRELSON, resolved, Quality::Clipped)
            } else {
                (b.bell.min(CIRELSON), resolved, Quality::Good)
            }
        }
        Err(_) => (2.0, resolved, Quality::Failed),
    }
}

/// Compute the violation map on an inclusive `nr x nphi` grid.
///
/// Rows are distributed over the rayon pool; assembly order is
/// deterministic. Each cell runs the bump (or full-profile) extraction with
/// the requested backend, `Auto` resolving per cell from the regime.
pub fn violation_map(
    r_range: (f64, f64),
    phi_range: (f64, f64),
    nr: usize,
    nphi: usize,
    backend: Backend,
    mode: MapMode,
    policy: &TruncationPolicy,
) -> Result<ViolationMap> {
    let (r0, r1) = r_range;
    let (p0, p1) = phi_range;
    if !(r0.is_finite() && r1.is_finite() && (0.0..=10.0).contains(&r0) && r0 <= r1 && r1 <= 10.0)
    {
        return Err(Error::InvalidParameter(format!(
            "r range [{r0}, {r1}] must be ordered inside [0, 10]"
        )));
    }
    if !(p0.is_finite()
        && p1.is_finite()
        && (0.0..=PI / 4.0 + 1e-12).contains(&p0)
        && p0 <= p1
        && p1 <= PI / 4.0 + 1e-12)
    {
        return Err(Error::InvalidParameter(format!(
            "phi range [{p0}, {p1}] must be ordered inside [0, pi/4]; larger phases fold by duality"
        )));
    }
    if nr < 2 || nphi < 2 || nr * nphi > 4_000_000 {
        return Err(Error::InvalidParameter(format!(
            "grid {nr} x {nphi} must be at least 2 x 2 and at most 4e6 cells"
        )));
    }
    let r_axis = linspace(r0, r1, nr);
    let phi_axis = linspace(p0, p1, nphi);
    let rows: Vec<Vec<(f64, Backend, Quality)>> = r_axis
        .par_iter()
        .map(|&r| {
            phi_axis
                .iter()
                .map(|&phi| map_cell(r, phi, backend, mode, policy))
                .collect()
        })
        .collect();
    let mut values = Vec::with_capacity(nr * nphi);
    let mut backends = Vec::with_capacity(nr * nphi);
    let mut quality = Vec::with_capacity(nr * nphi);
    for row in rows {
        for (v, b, q) in row {
            values.push(v);
            backends.push(b);
            quality.push(q);
        }
    }
    Ok(ViolationMap {
        r_axis,
        phi_axis,
        values,
        backend: backends,
        quality,
        mode,
        requested_backend: backend,
    })
}

/// Largest phase still violating at fixed `r`, for every column of the map
/// that violates at all.
///
/// The grid gives the bracketing cells and a linear-interpolation seed; the
/// crossing of `bell = 2 + epsilon` is then refined by bisection inside the
/// bracket, because the true boundary at large squeezing sits deep inside
/// the first grid cell where interpolation against a clamped neighbor
/// cannot resolve it.
pub fn violation_boundary(
    map: &ViolationMap,
    epsilon: f64,
    policy: &TruncationPolicy,
) -> Result<Vec<(f64, f64)>> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "boundary epsilon {epsilon} must be positive"
        )));
    }
    let nphi = map.phi_axis.len();
    let threshold = 2.0 + epsilon;
    let columns: Vec<Option<(f64, f64)>> = map
        .r_axis
        .par_iter()
        .enumerate()
        .map(|(i, &r)| {
            let last_violating = (0..nphi).rev().find(|&j| map.value(i, j) > threshold)?;
            if last_violating == nphi - 1 {
                // Violation persists through the edge of the phase window;
                // the boundary is beyond the map.
                return Some((r, map.phi_axis[nphi - 1]));
            }
            let mut lo = map.phi_axis[last_violating];
            let mut hi = map.phi_axis[last_violating + 1];
            let violated = |phi: f64| -> bool {
                let Ok(p) = SqueezingParams::new(r, phi) else {
                    return false;
                };
                let b = match map.mode {
                    MapMode::Bump => find_bump_max(&p, map.requested_backend, policy),
                    MapMode::Full => find_profile_max(&p, map.requested_backend, policy),
                };
                b.map(|b| b.bell > threshold).unwrap_or(false)
            };
            // Resolve the crossing to 5e-4 in the collapse coordinate
            // e^r phi, the scale the deep-squeezing criterion is stated in.
            let scale = r.exp();
            let mut iterations = 0;
            while (hi - lo) * scale > 5e-4 && iterations < 60 {
                let mid = 0.5 * (lo + hi);
                if violated(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
                iterations += 1;
            }
            Some((r, 0.5 * (lo + hi)))
        })
        .collect();
    Ok(columns.into_iter().flatten().collect())
}

/// Collapse-coordinate scan window; wider on the left than the default bump
/// window because the maximum moves to small bin widths as `x` shrinks.
const COLLAPSE_LG_LO: f64 = -6.0;
const COLLAPSE_LG_HI: f64 = 4.0;
const COLLAPSE_STEP: f64 = 0.15;

/// Bump maximum as a function of the collapse coordinate `x = e^r phi`,
/// evaluated with the reduced large-squeezing backend at the reference
/// squeezing `r_ref`.
///
/// Values are clamped at 2 like map cells. Requires `r_ref >= 4`: below
/// that the reduced form is outside its regime and its curve would not be a
/// function of `x` alone to any useful accuracy.
pub fn collapse_curve(
    x_values: &[f64],
    r_ref: f64,
    policy: &TruncationPolicy,
) -> Result<Vec<(f64, f64)>> {
    if !(r_ref.is_finite() && r_ref >= 4.0) {
        return Err(Error::InvalidParameter(format!(
            "collapse reference squeezing {r_ref} below the deep regime (need r_ref >= 4)"
        )));
    }
    let phi_cap = PI / 4.0 * r_ref.exp();
    for &x in x_values {
        if !(x.is_finite() && x > 0.0 && x <= phi_cap) {
            return Err(Error::InvalidParameter(format!(
                "collapse coordinate {x} must be positive and keep phi within [0, pi/4]"
            )));
        }
    }
    x_values
        .par_iter()
        .map(|&x| {
            let p = SqueezingParams::new(r_ref, x * (-r_ref).exp())?;
            let b = bump_max_in(
                &p,
                Backend::LargeSqueezing,
                policy,
                COLLAPSE_LG_LO,
                COLLAPSE_LG_HI,
                COLLAPSE_STEP,
                crate::bell::ScanRule::Bump,
            )?;
            Ok((x, b.bell))
        })
        .collect()
}

/// Collapse coordinate at which the reduced-backend bump crosses the
/// violation level `2 + epsilon`, bisected to `tol` in `x` inside
/// `[x_lo, x_hi]`; `None` when the bracket does not straddle the crossing.
pub fn collapse_crossing(
    x_lo: f64,
    x_hi: f64,
    r_ref: f64,
    tol: f64,
    policy: &TruncationPolicy,
) -> Result<Option<f64>> {
    if !(x_lo.is_finite() && x_hi.is_finite() && 0.0 < x_lo && x_lo < x_hi) {
        return Err(Error::InvalidParameter(format!(
            "collapse bracket [{x_lo}, {x_hi}] must be ordered and positive"
        )));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "bisection tolerance {tol} must be positive"
        )));
    }
    let bell_at = |x: f64| -> Result<f64> {
        Ok(collapse_curve(&[x], r_ref, policy)?[0].1)
    };
    let threshold = 2.0 + VIOLATION_EPSILON;
    let (mut lo, mut hi) = (x_lo, x_hi);
    if bell_at(lo)? <= threshold || bell_at(hi)? > threshold {
        return Ok(None);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if bell_at(mid)? > threshold {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn map_smoke_grid() {
        let policy = TruncationPolicy::default();
        let map = violation_map(
            (0.0, 5.0),
            (0.0, PI / 4.0),
            6,
            6,
            Backend::Auto,
            MapMode::Bump,
            &policy,
        )
        .unwrap();
        assert_eq!(map.values.len(), 36);
        for &v in &map.values {
            assert!((2.0..=CIRELSON + 1e-12).contains(&v), "value {v}");
        }
        // Vacuum row never violates; the deep-squeezing aligned corner does.
        for j in 0..6 {
            assert_eq!(map.value(0, j), 2.0);
        }
        assert!(map.value(5, 0) > 2.8);
        // Monotone in phi at fixed r within tolerance.
        for i in 0..6 {
            for j in 1..6 {
                assert!(map.value(i, j) <= map.value(i, j - 1) + 1e-3);
            }
        }
    }

    #[test]
    fn map_rejects_bad_grids() {
        let policy = TruncationPolicy::default();
        assert!(violation_map(
            (0.0, 11.0),
            (0.0, 0.5),
            4,
            4,
            Backend::Auto,
            MapMode::Bump,
            &policy
        )
        .is_err());
        assert!(violation_map(
            (0.0, 2.0),
            (0.0, 1.0),
            4,
            4,
            Backend::Auto,
            MapMode::Bump,
            &policy
        )
        .is_err());
        assert!(violation_map(
            (0.0, 2.0),
            (0.0, 0.5),
            1,
            4,
            Backend::Auto,
            MapMode::Bump,
            &policy
        )
        .is_err());
    }

    #[test]
    fn boundary_tracks_the_collapse_criterion() {
        let policy = TruncationPolicy::default();
        let map = violation_map(
            (3.5, 5.0),
            (0.0, PI / 4.0),
            4,
            10,
            Backend::Auto,
            MapMode::Bump,
            &policy,
        )
        .unwrap();
        let boundary = violation_boundary(&map, VIOLATION_EPSILON, &policy).unwrap();
        assert_eq!(boundary.len(), 4);
        for &(r, phi) in &boundary {
            let x = phi * r.exp();
            assert!((0.27..=0.41).contains(&x), "r={r} boundary x={x}");
        }
    }

    #[test]
    fn boundary_empty_below_threshold() {
        let policy = TruncationPolicy::default();
        let map = violation_map(
            (0.0, 1.0),
            (0.0, 0.1),
            3,
            3,
            Backend::Auto,
            MapMode::Bump,
            &policy,
        )
        .unwrap();
        let boundary = violation_boundary(&map, VIOLATION_EPSILON, &policy).unwrap();
        assert!(boundary.is_empty());
    }

    #[test]
    fn collapse_curve_crosses_at_the_criterion() {
        let policy = TruncationPolicy::default();
        let xstar = collapse_crossing(0.2, 0.6, 5.0, 1e-3, &policy)
            .unwrap()
            .unwrap();
        assert!((xstar - 0.34).abs() < 0.02, "crossing {xstar}");
        // Reference-squeezing independence: the r_ref = 4 and 5 curves match
        // pointwise.
        let xs: Vec<f64> = (0..14)
            .map(|i| 0.05 + (2.0 - 0.05) * i as f64 / 13.0)
            .collect();
        let c4 = collapse_curve(&xs, 4.0, &policy).unwrap();
        let c5 = collapse_curve(&xs, 5.0, &policy).unwrap();
        for ((x, b4), (_, b5)) in c4.iter().zip(&c5) {
            assert!((b4 - b5).abs() < 2e-3, "x={x}: {b4} vs {b5}");
        }
    }

    #[test]
    fn collapse_saturates_and_clamps() {
        let policy = TruncationPolicy::default();
        let curve = collapse_curve(&[0.01, 10.0], 5.0, &policy).unwrap();
        assert_abs_diff_eq!(curve[0].1, CIRELSON, epsilon = 0.02);
        assert_eq!(curve[1].1, 2.0);
        assert!(collapse_curve(&[0.3], 3.0, &policy).is_err());
        assert!(collapse_curve(&[-0.1], 5.0, &policy).is_err());
    }
}
