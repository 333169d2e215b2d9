//! Growth of `δ`-enlargements under an isoperimetric lower bound.
//!
//! If every set of volume `t < 1/2` has boundary measure at least `I(t)`, the
//! volume `y(δ)` of the `δ`-enlargement of a set of volume `ε` satisfies
//! `y' ≥ I(y)`. It therefore reaches one half no later than
//!
//! ```text
//! δ_M = ∫_ε^{1/2} dt / I(t)
//! ```
//!
//! and two sets of volume `ε` whose enlargements both exceed one half cannot
//! be further apart than `2 δ_M`.

use std::f64::consts::{E, LN_2};

use serde::Serialize;

use crate::error::{check_half_open_eps, Result};
use crate::family::{BodyFamily, ConstantsConfig, PExponent};
use crate::numeric::{integrate, QuadConfig};
use crate::profiles::IsoProfile;
use crate::specfun::phi_inv;

const TIME_QUAD: QuadConfig = QuadConfig::new(0.0, 1e-10);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnlargementResult {
    pub family: BodyFamily,
    pub epsilon: f64,
    pub delta_m: f64,
    /// Always `2 · delta_m`.
    pub distance_upper: f64,
    pub method: Method,
    /// Quadrature value of `δ_M`, when a cross-check was requested.
    pub quadrature_delta: Option<f64>,
    /// Whether the value depends on placeholder constants.
    pub parametric: bool,
}

/// `∫_ε^{1/2} dt / I(t)` by adaptive quadrature.
pub fn time_to_half(profile: &IsoProfile, eps: f64) -> Result<f64> {
    check_half_open_eps(eps)?;
    let q = integrate(
        // Errors cannot cross the closure; NaN makes the integrator fail loudly.
        |t| profile.eval_closed(t).map(|i| 1.0 / i).unwrap_or(f64::NAN),
        eps,
        0.5,
        TIME_QUAD,
    )?;
    Ok(q.value)
}

/// Closed-form `δ_M` for each family.
///
/// - cube: `-Φ^{-1}(ε)`
/// - ball (limit): `-Ψ^{-1}(ε) = -Φ^{-1}(ε)/√e`
/// - simplex: `-(ln ε + ln 2)/c_λ`
/// - `ℓp`: `(p/c_iso)((-ln ε)^{1/p} - (ln 2)^{1/p})`
pub fn delta_closed_form(family: BodyFamily, eps: f64, constants: &ConstantsConfig) -> Result<f64> {
    check_half_open_eps(eps)?;
    Ok(match family {
        BodyFamily::Cube => -phi_inv(eps)?,
        BodyFamily::Ball => -phi_inv(eps)? / E.sqrt(),
        BodyFamily::Simplex => -(eps.ln() + LN_2) / constants.c_lambda,
        BodyFamily::Lp(p) => {
            let pv = p.get();
            pv / constants.c_iso(p) * ((-eps.ln()).powf(1.0 / pv) - LN_2.powf(1.0 / pv))
        }
    })
}

/// Upper bound on the distance between two subsets of volume `eps`.
///
/// The bound does not depend on the dimension. For the ball it is the
/// `n → ∞` limit. With `cross_check` set the quadrature value is stored too.
pub fn distance_upper_bound(
    family: BodyFamily,
    eps: f64,
    constants: &ConstantsConfig,
    cross_check: bool,
) -> Result<EnlargementResult> {
    let delta_m = delta_closed_form(family, eps, constants)?;
    let quadrature_delta =
        if cross_check { Some(time_to_half(&IsoProfile::for_family(family, constants), eps)?) } else { None };
    Ok(EnlargementResult {
        family,
        epsilon: eps,
        delta_m,
        distance_upper: 2.0 * delta_m,
        method: Method::ClosedForm,
        quadrature_delta,
        parametric: matches!(family, BodyFamily::Simplex | BodyFamily::Lp(_)),
    })
}

/// Same as [`distance_upper_bound`] but the quadrature value is primary.
pub fn distance_upper_bound_quadrature(
    family: BodyFamily,
    eps: f64,
    constants: &ConstantsConfig,
) -> Result<EnlargementResult> {
    let delta_m = time_to_half(&IsoProfile::for_family(family, constants), eps)?;
    Ok(EnlargementResult {
        family,
        epsilon: eps,
        delta_m,
        distance_upper: 2.0 * delta_m,
        method: Method::Quadrature,
        quadrature_delta: Some(delta_m),
        parametric: matches!(family, BodyFamily::Simplex | BodyFamily::Lp(_)),
    })
}

/// The simplex bound in the looser form `-(2/c_λ) ln ε`, which drops the
/// `ln 2` term of the tight closed form.
pub fn simplex_statement_upper(eps: f64, constants: &ConstantsConfig) -> Result<f64> {
    check_half_open_eps(eps)?;
    Ok(-2.0 / constants.c_lambda * eps.ln())
}

/// The `ℓp` bound in the form `(2p/c_iso)(-ln ε)^{1/p}`, without the
/// `(ln 2)^{1/p}` correction.
pub fn lp_statement_upper(eps: f64, p: PExponent, constants: &ConstantsConfig) -> Result<f64> {
    check_half_open_eps(eps)?;
    let pv = p.get();
    Ok(2.0 * pv / constants.c_iso(p) * (-eps.ln()).powf(1.0 / pv))
}

/// Explicit Euler integration of `y' = I(y)` from `y(0) = eps` up to time
/// `delta`, saturating at one half. Returns `y(delta)`.
pub fn euler_reach(profile: &IsoProfile, eps: f64, delta: f64, step: f64) -> Result<f64> {
    check_half_open_eps(eps)?;
    let mut y = eps;
    let mut elapsed = 0.0;
    let steps = (delta / step).floor() as u64;
    for i in 0..=steps {
        let h = if i == steps { delta - elapsed } else { step };
        if h <= 0.0 {
            break;
        }
        if y >= 0.5 {
            return Ok(0.5);
        }
        y += h * profile.eval(y)?;
        elapsed = (i + 1) as f64 * step;
    }
    Ok(y.min(0.5))
}
