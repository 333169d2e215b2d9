//! Special functions: the Gaussian-type distribution `Φ` with density
//! `e^{-πx²}`, the generalised family `Φ_p` with density `e^{-κ_p|x|^p}`, their
//! rescaled limits `Ψ_p`, inverses, and the unit-volume radii of every body
//! family.
//!
//! `Φ` is evaluated through the complementary error function; `Φ_p` through
//! adaptive quadrature of its density. The two routes meet at `p = 2`, where
//! `κ_2 = π` and the functions coincide.

use std::f64::consts::{E, PI};

use libm::{erfc, lgamma as ln_gamma, tgamma as gamma};
use serde::Serialize;

use crate::error::{domain, Result};
use crate::family::{BodyFamily, PExponent};
use crate::numeric::{brent, integrate, QuadConfig};

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Smallest and largest probabilities handed out for finite arguments.
const P_MIN: f64 = f64::MIN_POSITIVE;
const P_MAX: f64 = 1.0 - f64::EPSILON / 2.0;

/// Mass of the `Φ_p` density beyond the truncation point, relative to the
/// density at the lower limit: `e^{-45} ≈ 3e-20`.
const TAIL_CUTOFF: f64 = 45.0;

const PHI_P_QUAD: QuadConfig = QuadConfig::new(0.0, 5e-14);

#[inline]
fn clamp_prob(p: f64) -> f64 {
    p.clamp(P_MIN, P_MAX)
}

/// `Φ(a) = ∫_{-∞}^a e^{-πx²} dx`.
pub fn phi(a: f64) -> f64 {
    if a == f64::INFINITY {
        return 1.0;
    }
    if a == f64::NEG_INFINITY {
        return 0.0;
    }
    clamp_prob(0.5 * erfc(-a * SQRT_PI))
}

/// Density of [`phi`].
#[inline]
pub fn phi_density(a: f64) -> f64 {
    (-PI * a * a).exp()
}

fn check_open_unit(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(domain(format!("probability must lie in (0, 1), got {eps}")))
    }
}

/// Inverts a strictly increasing CDF on `(-∞, 0]` for `eps < 1/2` by Brent's
/// method on `ln cdf(a) - ln eps`.
fn invert_lower_half<F: Fn(f64) -> f64>(cdf: F, eps: f64, guess: f64) -> Result<f64> {
    let target = eps.ln();
    let mut lo = 2.0 * guess - 1.0;
    let mut steps = 0;
    while cdf(lo) >= eps {
        lo *= 2.0;
        steps += 1;
        if steps > 60 {
            return Err(crate::Error::NonConvergence(format!("cannot bracket inverse of {eps}")));
        }
    }
    brent(|a| cdf(a).ln() - target, lo, 0.0, 1e-15, 200)
}

/// Inverse of [`phi`].
pub fn phi_inv(eps: f64) -> Result<f64> {
    check_open_unit(eps)?;
    if eps == 0.5 {
        return Ok(0.0);
    }
    if eps > 0.5 {
        return phi_inv(1.0 - eps).map(|a| -a);
    }
    invert_lower_half(phi, eps, phi_inv_asymptote_unchecked(eps))
}

/// Density constant `κ_p = 2^p Γ(1+1/p)^p` making `e^{-κ_p|x|^p}` a
/// probability density.
pub fn kappa(p: PExponent) -> f64 {
    let p = p.get();
    (2.0 * gamma(1.0 + 1.0 / p)).powf(p)
}

/// Mass of `e^{-κ_p t^p}` on `[x, ∞)` for `x ≥ 0`.
fn phi_p_upper_tail(x: f64, p: f64, kappa: f64) -> Result<f64> {
    let upper = (x.powf(p) + TAIL_CUTOFF / kappa).powf(1.0 / p);
    let q = integrate(|t| (-kappa * t.powf(p)).exp(), x, upper, PHI_P_QUAD)?;
    Ok(q.value)
}

/// `Φ_p(a) = ∫_{-∞}^a e^{-κ_p|x|^p} dx`.
pub fn phi_p(a: f64, p: PExponent) -> Result<f64> {
    if a == f64::INFINITY {
        return Ok(1.0);
    }
    if a == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    if a.is_nan() {
        return Err(domain("argument is NaN"));
    }
    if a == 0.0 {
        return Ok(0.5);
    }
    let k = kappa(p);
    let tail = phi_p_upper_tail(a.abs(), p.get(), k)?;
    Ok(clamp_prob(if a < 0.0 { tail } else { 1.0 - tail }))
}

/// Inverse of [`phi_p`].
pub fn phi_p_inv(eps: f64, p: PExponent) -> Result<f64> {
    check_open_unit(eps)?;
    if eps == 0.5 {
        return Ok(0.0);
    }
    if eps > 0.5 {
        return phi_p_inv(1.0 - eps, p).map(|a| -a);
    }
    let guess = -(-eps.ln() / kappa(p)).powf(1.0 / p.get());
    // Quadrature failures inside the search surface as NaN and abort Brent.
    invert_lower_half(|a| phi_p(a, p).unwrap_or(f64::NAN), eps, guess)
}

/// `Ψ_p(a) = Φ_p(e^{1/p} a)`: the limit of the tail volumes of unit-volume
/// `ℓp` balls cut orthogonally to a coordinate axis.
pub fn psi_p(a: f64, p: PExponent) -> Result<f64> {
    phi_p((1.0 / p.get()).exp() * a, p)
}

pub fn psi_p_inv(eps: f64, p: PExponent) -> Result<f64> {
    Ok(phi_p_inv(eps, p)? / (1.0 / p.get()).exp())
}

/// `Ψ(a) = Φ(√e a)`, the Euclidean (`p = 2`) case of [`psi_p`].
pub fn psi(a: f64) -> f64 {
    phi(E.sqrt() * a)
}

pub fn psi_inv(eps: f64) -> Result<f64> {
    Ok(phi_inv(eps)? / E.sqrt())
}

/// Radius (or side, for the cube) that gives a body of the family unit volume
/// in dimension `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FamilyRadius {
    pub family: BodyFamily,
    pub n: usize,
    pub omega_n: f64,
}

/// Radius of the unit-volume `ℓp^n` ball, `Γ(1+n/p)^{1/n} / (2Γ(1+1/p))`.
///
/// This is the single source of the radius for both balls and `ℓp` balls.
pub(crate) fn lp_radius(n: usize, p: f64) -> f64 {
    let n = n as f64;
    (ln_gamma(1.0 + n / p) / n).exp() / (2.0 * gamma(1.0 + 1.0 / p))
}

/// Scale `ω_n` turning the standard simplex `{x ≥ 0, Σx = 1}` into a
/// unit-volume regular simplex: `(n! / (n√n))^{1/(n-1)}`.
pub(crate) fn simplex_radius(n: usize) -> f64 {
    let nf = n as f64;
    ((ln_gamma(nf + 1.0) - 1.5 * nf.ln()) / (nf - 1.0)).exp()
}

pub fn unit_volume_radius(family: BodyFamily, n: usize) -> Result<FamilyRadius> {
    if n == 0 {
        return Err(domain("dimension n must be at least 1"));
    }
    let omega_n = match family {
        BodyFamily::Cube => 1.0,
        BodyFamily::Ball => lp_radius(n, 2.0),
        BodyFamily::Lp(p) => lp_radius(n, p.get()),
        BodyFamily::Simplex => {
            if n < 2 {
                return Err(domain("the simplex needs n >= 2"));
            }
            simplex_radius(n)
        }
    };
    Ok(FamilyRadius { family, n, omega_n })
}

fn check_small_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 0.5 {
        Ok(())
    } else {
        Err(domain("eps must lie in (0, 0.5)"))
    }
}

fn phi_inv_asymptote_unchecked(eps: f64) -> f64 {
    -(-eps.ln()).sqrt() / SQRT_PI
}

/// Leading-order behaviour of `Φ^{-1}(ε)` as `ε → 0`: `-√(-ln ε)/√π`.
pub fn phi_inv_asymptote(eps: f64) -> Result<f64> {
    check_small_eps(eps)?;
    Ok(phi_inv_asymptote_unchecked(eps))
}

/// Leading-order behaviour of `Ψ_p^{-1}(ε)`:
/// `-(-ln ε)^{1/p} / (2 e^{1/p} Γ(1+1/p))`.
pub fn psi_p_inv_asymptote(eps: f64, p: PExponent) -> Result<f64> {
    check_small_eps(eps)?;
    let p = p.get();
    Ok(-(-eps.ln()).powf(1.0 / p) / (2.0 * (1.0 / p).exp() * gamma(1.0 + 1.0 / p)))
}
