//! Explicit pairs of far-apart regions, giving lower bounds on the largest
//! distance between two subsets of volume `ε`, and the [`BoundReport`] that
//! puts lower and upper bounds side by side.
//!
//! Distances are always evaluated from region descriptors in closed form by
//! [`region_distance`]; only volumes are ever computed numerically.

use std::f64::consts::{E, PI, SQRT_2};

use serde::Serialize;

use crate::enlargement::{distance_upper_bound, lp_statement_upper, simplex_statement_upper};
use crate::error::{check_half_open_eps, domain, Error, Result};
use crate::family::{BodyFamily, ConstantsConfig, PExponent};
use crate::numeric::brent;
use crate::sections::{cube_sum_cdf, lp_tail_volume, IRWIN_HALL_EXACT_MAX_N};
use crate::specfun::{lp_radius, phi_inv, psi_p_inv, simplex_radius};

/// Volume tolerance of the threshold root finding.
pub const VOLUME_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `{coordinate ≤ threshold}`
    Below,
    /// `{coordinate ≥ threshold}`
    Above,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegionKind {
    /// `{x_axis ≤ threshold}` or `{x_axis ≥ threshold}`.
    HalfspaceCap { axis: usize, threshold: f64, side: Side },
    /// `{Σx ≤ s}` or `{Σx ≥ s}`.
    DiagonalSlab { sum_threshold: f64, side: Side },
    /// The half of the simplex nearest to a vertex, shrunk toward that vertex
    /// by the factor `alpha`.
    CornerHomothety { vertex_index: usize, alpha: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionDescriptor {
    pub kind: RegionKind,
    pub family: BodyFamily,
    pub n: usize,
}

/// How the volume of a witness region was established.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum VolumeCertificate {
    Exact,
    Quadrature {
        tol: f64,
    },
    /// Irwin–Hall CDF above the exact-arithmetic range.
    NormalApproximation,
    MonteCarlo {
        half_width_95: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionPair {
    pub a: RegionDescriptor,
    pub b: RegionDescriptor,
    pub requested_eps: f64,
    /// Volume of each of the two regions (they are congruent).
    pub volume_each: f64,
    pub certificate: VolumeCertificate,
    pub distance: f64,
}

/// Euclidean distance between two regions, from their descriptors alone.
pub fn region_distance(a: &RegionDescriptor, b: &RegionDescriptor) -> Result<f64> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch(a.n, b.n));
    }
    if a.family != b.family {
        return Err(domain("regions belong to different bodies"));
    }
    let gap = |lo: f64, hi: f64| (hi - lo).max(0.0);
    match (a.kind, b.kind) {
        (
            RegionKind::HalfspaceCap { axis: ax, threshold: ta, side: sa },
            RegionKind::HalfspaceCap { axis: bx, threshold: tb, side: sb },
        ) if ax == bx => match (sa, sb) {
            (Side::Below, Side::Above) => Ok(gap(ta, tb)),
            (Side::Above, Side::Below) => Ok(gap(tb, ta)),
            _ => Ok(0.0),
        },
        (
            RegionKind::DiagonalSlab { sum_threshold: ta, side: sa },
            RegionKind::DiagonalSlab { sum_threshold: tb, side: sb },
        ) => {
            let root_n = (a.n as f64).sqrt();
            match (sa, sb) {
                (Side::Below, Side::Above) => Ok(gap(ta, tb) / root_n),
                (Side::Above, Side::Below) => Ok(gap(tb, ta) / root_n),
                _ => Ok(0.0),
            }
        }
        (
            RegionKind::CornerHomothety { vertex_index: va, alpha: aa },
            RegionKind::CornerHomothety { vertex_index: vb, alpha: ab },
        ) => {
            if va == vb {
                return Ok(0.0);
            }
            // Each region reaches a fraction alpha/2 of the edge from its vertex.
            let edge = SQRT_2 * simplex_radius(a.n);
            Ok(edge * (1.0 - 0.5 * (aa + ab)).max(0.0))
        }
        _ => Err(domain("no closed-form distance for this pair of region kinds")),
    }
}

fn pair(
    a: RegionDescriptor,
    b: RegionDescriptor,
    eps: f64,
    volume_each: f64,
    certificate: VolumeCertificate,
) -> Result<RegionPair> {
    let distance = region_distance(&a, &b)?;
    Ok(RegionPair { a, b, requested_eps: eps, volume_each, certificate, distance })
}

/// Root of a monotone volume function on `[lo, hi]`, accepted only if the
/// volume there is within [`VOLUME_TOL`] of `eps`.
fn solve_volume<F: Fn(f64) -> Result<f64>>(volume: F, eps: f64, lo: f64, hi: f64) -> Result<(f64, f64)> {
    let mut failure = None;
    let root = brent(
        |x| match volume(x) {
            Ok(v) => v - eps,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        lo,
        hi,
        1e-14,
        200,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let root = root?;
    let v = volume(root)?;
    if (v - eps).abs() > VOLUME_TOL {
        return Err(Error::NonConvergence(format!("volume {v} at the root misses {eps}")));
    }
    Ok((root, v))
}

/// Two opposite caps `{x_1 ≤ -a}`, `{x_1 ≥ a}` of the unit-volume `ℓp^n` ball,
/// each of volume `eps`. `n = 1` is the segment `[-1/2, 1/2]`.
pub fn lp_caps_witness(n: usize, p: PExponent, eps: f64) -> Result<RegionPair> {
    check_half_open_eps(eps)?;
    if n == 0 {
        return Err(domain("dimension n must be at least 1"));
    }
    let family = if p.get() == 2.0 { BodyFamily::Ball } else { BodyFamily::Lp(p) };
    let omega = lp_radius(n, p.get());
    let (a, v) = solve_volume(|x| lp_tail_volume(x, p, n), eps, 0.0, omega)?;
    let cap =
        |threshold, side| RegionDescriptor { kind: RegionKind::HalfspaceCap { axis: 0, threshold, side }, family, n };
    pair(cap(-a, Side::Below), cap(a, Side::Above), eps, v, VolumeCertificate::Quadrature { tol: VOLUME_TOL })
}

pub fn ball_caps_witness(n: usize, eps: f64) -> Result<RegionPair> {
    lp_caps_witness(n, PExponent::TWO, eps)
}

/// Slabs `{Σx ≤ n/2 - a√n}` and `{Σx ≥ n/2 + a√n}` of the unit cube cut by
/// hyperplanes orthogonal to the main diagonal.
pub fn cube_diagonal_witness(n: usize, eps: f64) -> Result<RegionPair> {
    check_half_open_eps(eps)?;
    if n == 0 {
        return Err(domain("dimension n must be at least 1"));
    }
    let half = 0.5 * n as f64;
    let (s, v) = solve_volume(|s| Ok(cube_sum_cdf(n, s)), eps, 0.0, half)?;
    // The upper slab is the mirror image under x -> 1 - x.
    let upper = n as f64 - s;
    let slab = |sum_threshold, side| RegionDescriptor {
        kind: RegionKind::DiagonalSlab { sum_threshold, side },
        family: BodyFamily::Cube,
        n,
    };
    let certificate =
        if n <= IRWIN_HALL_EXACT_MAX_N { VolumeCertificate::Exact } else { VolumeCertificate::NormalApproximation };
    pair(slab(s, Side::Below), slab(upper, Side::Above), eps, v, certificate)
}

/// Two corners of the unit-volume regular simplex, each the half-simplex
/// nearest a vertex shrunk by `α = (2ε')^{1/(n-1)}`, of volume exactly `ε'`.
pub fn simplex_corner_witness(n: usize, eps_prime: f64) -> Result<RegionPair> {
    check_half_open_eps(eps_prime)?;
    if n < 2 {
        return Err(domain("the simplex needs n >= 2"));
    }
    let alpha = ((2.0 * eps_prime).ln() / (n as f64 - 1.0)).exp();
    let corner = |vertex_index| RegionDescriptor {
        kind: RegionKind::CornerHomothety { vertex_index, alpha },
        family: BodyFamily::Simplex,
        n,
    };
    let volume = 0.5 * alpha.powi(n as i32 - 1);
    pair(corner(0), corner(1), eps_prime, volume, VolumeCertificate::Exact)
}

/// `-2Φ^{-1}(ε)/√e`, a lower bound valid for every family of centrally
/// symmetric unit-volume bodies.
pub fn general_symmetric_lower(eps: f64) -> Result<f64> {
    check_half_open_eps(eps)?;
    Ok(-2.0 * phi_inv(eps)? / E.sqrt())
}

/// Lower and upper bounds for one family at one `ε`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub family: BodyFamily,
    pub epsilon: f64,
    pub n: Option<usize>,
    pub lower: f64,
    pub upper: f64,
    /// `2 δ_M` from the closed-form enlargement time; equals `upper` except
    /// for the simplex and `ℓp` balls, where `upper` drops a `ln 2` term.
    pub upper_tight: f64,
    pub exact_limit: Option<f64>,
    /// Whether `upper` depends on placeholder constants.
    pub parametric: bool,
    pub constants: ConstantsConfig,
    /// Distance of the explicit witness pair in dimension `n`, if requested.
    pub witness_distance: Option<f64>,
    /// Limit of the largest Manhattan distance divided by `√n` (cube only).
    pub manhattan_limit: Option<f64>,
}

/// Canonical form of a family: `ℓ2` is the Euclidean ball.
pub fn canonical_family(family: BodyFamily) -> BodyFamily {
    match family {
        BodyFamily::Lp(p) if p.get() == 2.0 => BodyFamily::Ball,
        f => f,
    }
}

/// Witness pair for the family in dimension `n`.
pub fn family_witness(family: BodyFamily, n: usize, eps: f64) -> Result<RegionPair> {
    match canonical_family(family) {
        BodyFamily::Ball => ball_caps_witness(n, eps),
        BodyFamily::Cube => cube_diagonal_witness(n, eps),
        BodyFamily::Simplex => simplex_corner_witness(n, eps),
        BodyFamily::Lp(p) => lp_caps_witness(n, p, eps),
    }
}

pub fn bound_report(
    family: BodyFamily,
    eps: f64,
    n: Option<usize>,
    constants: &ConstantsConfig,
) -> Result<BoundReport> {
    check_half_open_eps(eps)?;
    constants.validate()?;
    let family = canonical_family(family);
    let upper_tight = distance_upper_bound(family, eps, constants, false)?.distance_upper;
    let (lower, upper, exact_limit, manhattan_limit) = match family {
        BodyFamily::Ball => {
            let v = general_symmetric_lower(eps)?;
            (v, v, Some(v), None)
        }
        BodyFamily::Cube => {
            let v = -2.0 * (PI / 6.0).sqrt() * phi_inv(eps)?;
            (v, upper_tight, None, Some(v))
        }
        BodyFamily::Simplex => {
            let lower = -(SQRT_2 / E) * (2.0 * eps).ln();
            (lower, simplex_statement_upper(eps, constants)?, None, None)
        }
        BodyFamily::Lp(p) => (-2.0 * psi_p_inv(eps, p)?, lp_statement_upper(eps, p, constants)?, None, None),
    };
    let witness_distance = match n {
        Some(n) => Some(family_witness(family, n, eps)?.distance),
        None => None,
    };
    Ok(BoundReport {
        family,
        epsilon: eps,
        n,
        lower,
        upper,
        upper_tight,
        exact_limit,
        parametric: family.is_parametric(),
        constants: constants.clone(),
        witness_distance,
        manhattan_limit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::psi_p;

    fn pe(p: f64) -> PExponent {
        PExponent::new(p).unwrap()
    }

    #[test]
    fn segment_cases() {
        let w = ball_caps_witness(1, 0.25).unwrap();
        assert!((w.distance - 0.5).abs() < 1e-10);
        let w = cube_diagonal_witness(1, 0.25).unwrap();
        assert!((w.distance - 0.5).abs() < 1e-10);
        assert_eq!(w.certificate, VolumeCertificate::Exact);
    }

    #[test]
    fn ball_caps_approach_limit() {
        let w = ball_caps_witness(500, 0.1).unwrap();
        let limit = general_symmetric_lower(0.1).unwrap();
        assert!((limit - 0.620_195_921_646_94).abs() < 1e-12);
        assert!((w.distance - limit).abs() < 0.02, "{}", w.distance);
        assert!((w.volume_each - 0.1).abs() <= VOLUME_TOL);
    }

    #[test]
    fn ball_caps_shrink_near_half() {
        let w = ball_caps_witness(20, 0.5 - 1e-6).unwrap();
        assert!(w.distance < 1e-4);
    }

    #[test]
    fn lp_two_is_the_ball() {
        let a = lp_caps_witness(50, PExponent::TWO, 0.1).unwrap();
        let b = ball_caps_witness(50, 0.1).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn lp_one_caps_near_limit() {
        let w = lp_caps_witness(400, PExponent::ONE, 0.1).unwrap();
        let limit = -2.0 * psi_p_inv(0.1, PExponent::ONE).unwrap();
        assert!((w.distance / limit - 1.0).abs() < 0.05, "{} vs {limit}", w.distance);
        let far = lp_caps_witness(30, pe(1.5), 0.05).unwrap();
        let near = lp_caps_witness(30, pe(1.5), 0.2).unwrap();
        assert!(far.distance > near.distance);
    }

    #[test]
    fn cube_small_and_clt() {
        let w = cube_diagonal_witness(2, 0.125).unwrap();
        match w.a.kind {
            RegionKind::DiagonalSlab { sum_threshold, .. } => assert!((sum_threshold - 0.5).abs() < 1e-9),
            _ => panic!(),
        }
        assert!((w.distance - 1.0 / SQRT_2).abs() < 1e-9);
        let w = cube_diagonal_witness(30, 0.1).unwrap();
        assert!((w.distance / 0.74 - 1.0).abs() < 0.1);
        let big = cube_diagonal_witness(60, 0.1).unwrap();
        assert_eq!(big.certificate, VolumeCertificate::NormalApproximation);
    }

    #[test]
    fn simplex_corners() {
        let w = simplex_corner_witness(2, 0.25).unwrap();
        assert!((w.distance - 0.5).abs() < 1e-14);
        assert!((w.volume_each - 0.25).abs() < 1e-15);
        let w = simplex_corner_witness(10_000, 0.25).unwrap();
        let limit = SQRT_2 / E * 2f64.ln();
        assert!((limit - 0.360_616_818_022_96).abs() < 1e-12);
        assert!((w.distance / limit - 1.0).abs() < 0.01);
        assert!(simplex_corner_witness(5, 0.5 - 1e-12).unwrap().distance < 1e-9);
    }

    #[test]
    fn distance_reproduced_from_descriptors() {
        let pairs = [
            ball_caps_witness(40, 0.2).unwrap(),
            cube_diagonal_witness(12, 0.1).unwrap(),
            simplex_corner_witness(7, 0.3).unwrap(),
            lp_caps_witness(25, pe(1.3), 0.05).unwrap(),
        ];
        for w in pairs {
            assert_eq!(region_distance(&w.a, &w.b).unwrap().to_bits(), w.distance.to_bits());
            assert_eq!(region_distance(&w.b, &w.a).unwrap().to_bits(), w.distance.to_bits());
            assert!(w.volume_each >= w.requested_eps - VOLUME_TOL);
        }
    }

    #[test]
    fn mismatched_descriptors_rejected() {
        let a = ball_caps_witness(5, 0.2).unwrap();
        let b = ball_caps_witness(6, 0.2).unwrap();
        assert!(matches!(region_distance(&a.a, &b.b), Err(Error::DimensionMismatch(5, 6))));
        let c = cube_diagonal_witness(5, 0.2).unwrap();
        assert!(region_distance(&a.a, &c.b).is_err());
    }

    #[test]
    fn report_examples() {
        let c = ConstantsConfig::default();
        let r = bound_report(BodyFamily::Ball, 0.1, None, &c).unwrap();
        assert_eq!(r.lower, r.upper);
        assert_eq!(r.exact_limit, Some(r.upper));
        assert!((r.upper - 0.620_195_921_646_94).abs() < 1e-12);
        assert!(!r.parametric);
        let r = bound_report(BodyFamily::Cube, 0.1, None, &c).unwrap();
        assert!((r.lower - 0.739_904_141_347_56).abs() < 1e-12);
        assert!((r.upper - 1.022_530_208_020_78).abs() < 1e-12);
        assert_eq!(r.manhattan_limit, Some(r.lower));
        let r = bound_report(BodyFamily::Simplex, 0.1, None, &c).unwrap();
        assert!((r.lower - SQRT_2 / E * 5f64.ln()).abs() < 1e-15);
        assert!((r.lower - 0.837_326_321_256_405).abs() < 1e-12);
        assert!(r.parametric);
        assert!(bound_report(BodyFamily::Cube, 0.5, None, &c).is_err());
    }

    #[test]
    fn lp_two_report_is_ball_report() {
        let c = ConstantsConfig::default();
        let a = bound_report(BodyFamily::Lp(PExponent::TWO), 0.07, None, &c).unwrap();
        let b = bound_report(BodyFamily::Ball, 0.07, None, &c).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn witnesses_below_uppers() {
        let c = ConstantsConfig::default();
        let fams = [BodyFamily::Cube, BodyFamily::Simplex, BodyFamily::Lp(pe(1.5)), BodyFamily::Lp(PExponent::ONE)];
        for f in fams {
            for eps in [0.01, 0.02, 0.05, 0.1, 0.25, 0.45] {
                for n in [50, 200, 500] {
                    let r = bound_report(f, eps, Some(n), &c).unwrap();
                    let w = r.witness_distance.unwrap();
                    assert!(w <= r.upper_tight && w <= r.upper, "{f} eps {eps} n {n}: {w} > {}", r.upper_tight);
                    if !r.parametric {
                        assert!(r.lower <= r.upper);
                    }
                }
            }
        }
    }

    /// The ball bound is a limit: finite-n caps sit slightly farther apart
    /// and approach it from above.
    #[test]
    fn ball_witnesses_approach_limit_from_above() {
        let c = ConstantsConfig::default();
        for eps in [0.01, 0.02, 0.05, 0.1, 0.25, 0.45] {
            let excess: Vec<f64> = [50, 200, 500]
                .iter()
                .map(|&n| {
                    let r = bound_report(BodyFamily::Ball, eps, Some(n), &c).unwrap();
                    r.witness_distance.unwrap() - r.upper
                })
                .collect();
            assert!(excess[0] > excess[1] && excess[1] > excess[2] && excess[2] > 0.0, "eps {eps}: {excess:?}");
        }
        // Beta-marginal oracle for the 50-ball cap pair at eps = 0.1.
        let w = ball_caps_witness(50, 0.1).unwrap();
        assert!((w.distance - 0.643_903_342_715_927).abs() < 1e-9);
    }

    #[test]
    fn lp_lower_matches_limit_cdf() {
        let p = pe(1.5);
        let r = bound_report(BodyFamily::Lp(p), 0.1, None, &ConstantsConfig::default()).unwrap();
        assert!((psi_p(-0.5 * r.lower, p).unwrap() - 0.1).abs() < 1e-12);
    }
}
