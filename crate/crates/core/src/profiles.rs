//! Isoperimetric lower-bound profiles `I(t)`, `t ∈ (0, 1/2)`, one per body
//! family.
//!
//! | family | profile |
//! |--------|---------|
//! | cube | `e^{-π Φ^{-1}(t)²}` |
//! | ball (n → ∞) | `Ψ'(Ψ^{-1}(t)) = √e e^{-π Φ^{-1}(t)²}` |
//! | simplex | `c_λ t` |
//! | `ℓp` ball | `c_iso(p) t (-ln t)^{1-1/p}` |
//!
//! Constants without known values come from [`ConstantsConfig`].

use std::f64::consts::{E, PI};

use serde::Serialize;

use crate::error::{domain, Result};
use crate::family::{BodyFamily, ConstantsConfig, PExponent};
use crate::specfun::phi_inv;

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t < 0.5 {
        Ok(())
    } else {
        Err(domain(format!("profile argument must lie in (0, 0.5), got {t}")))
    }
}

/// Profile of Lebesgue measure on the unit cube.
pub fn cube_profile(t: f64) -> Result<f64> {
    check_t(t)?;
    let a = phi_inv(t)?;
    Ok((-PI * a * a).exp())
}

/// Limiting profile of unit-volume Euclidean balls as `n → ∞`.
pub fn ball_profile_limit(t: f64) -> Result<f64> {
    check_t(t)?;
    // Ψ^{-1}(t) = Φ^{-1}(t)/√e, so πe Ψ^{-1}(t)² = π Φ^{-1}(t)².
    let a = phi_inv(t)?;
    Ok(E.sqrt() * (-PI * a * a).exp())
}

pub fn simplex_profile(t: f64, constants: &ConstantsConfig) -> Result<f64> {
    check_t(t)?;
    Ok(constants.c_lambda * t)
}

pub fn lp_profile(t: f64, p: PExponent, constants: &ConstantsConfig) -> Result<f64> {
    check_t(t)?;
    Ok(constants.c_iso(p) * t * (-t.ln()).powf(1.0 - 1.0 / p.get()))
}

/// Exact profile of the one-sided exponential measure on `(0, ∞)`.
pub fn exp_measure_profile(t: f64) -> Result<f64> {
    if t > 0.0 && t < 1.0 {
        Ok(t.min(1.0 - t))
    } else {
        Err(domain(format!("argument must lie in (0, 1), got {t}")))
    }
}

/// Derivative of `x (-ln x)^{1-1/p}`:
/// `(-ln x)^{-1/p} ((-ln x) - (1 - 1/p))`, positive on `(0, 1/2]`.
pub fn xlog_power_derivative(x: f64, p: PExponent) -> Result<f64> {
    if !(x > 0.0 && x <= 0.5) {
        return Err(domain(format!("argument must lie in (0, 0.5], got {x}")));
    }
    let p = p.get();
    let l = -x.ln();
    Ok(l.powf(-1.0 / p) * (l - (1.0 - 1.0 / p)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileForm {
    Cube,
    BallLimit,
    SimplexLinear,
    LpLoglinear,
    ExpMeasure,
}

/// An evaluable isoperimetric lower bound together with the constants it was
/// built from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsoProfile {
    pub family: BodyFamily,
    pub constants: ConstantsConfig,
    pub form: ProfileForm,
}

impl IsoProfile {
    pub fn for_family(family: BodyFamily, constants: &ConstantsConfig) -> Self {
        let form = match family {
            BodyFamily::Cube => ProfileForm::Cube,
            BodyFamily::Ball => ProfileForm::BallLimit,
            BodyFamily::Simplex => ProfileForm::SimplexLinear,
            BodyFamily::Lp(_) => ProfileForm::LpLoglinear,
        };
        Self { family, constants: constants.clone(), form }
    }

    /// Profile of the one-dimensional exponential measure. Its domain is the
    /// whole of `(0, 1)`.
    pub fn exp_measure() -> Self {
        Self { family: BodyFamily::Simplex, constants: ConstantsConfig::default(), form: ProfileForm::ExpMeasure }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        match self.form {
            ProfileForm::Cube => cube_profile(t),
            ProfileForm::BallLimit => ball_profile_limit(t),
            ProfileForm::SimplexLinear => simplex_profile(t, &self.constants),
            ProfileForm::LpLoglinear => {
                let p = match self.family {
                    BodyFamily::Lp(p) => p,
                    _ => PExponent::ONE,
                };
                lp_profile(t, p, &self.constants)
            }
            ProfileForm::ExpMeasure => exp_measure_profile(t),
        }
    }

    /// Closed-range evaluation: `t = 1/2` is the continuous limit of the
    /// open-interval profile.
    pub(crate) fn eval_closed(&self, t: f64) -> Result<f64> {
        if t == 0.5 && self.form != ProfileForm::ExpMeasure {
            let c = &self.constants;
            return Ok(match self.form {
                ProfileForm::Cube => 1.0,
                ProfileForm::BallLimit => E.sqrt(),
                ProfileForm::SimplexLinear => 0.5 * c.c_lambda,
                ProfileForm::LpLoglinear => {
                    let p = self.family.p().unwrap_or(1.0);
                    c.c_iso(PExponent::new(p)?) * 0.5 * std::f64::consts::LN_2.powf(1.0 - 1.0 / p)
                }
                ProfileForm::ExpMeasure => unreachable!(),
            });
        }
        self.eval(t)
    }

    pub fn is_parametric(&self) -> bool {
        matches!(self.form, ProfileForm::SimplexLinear | ProfileForm::LpLoglinear)
    }
}
