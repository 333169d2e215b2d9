//! Hyperplane sections of unit-volume bodies and their high-dimensional
//! limits.
//!
//! For the unit-volume `ℓp^n` ball of radius `ω_n`, `S_n(x)` is the
//! `(n-1)`-volume of the section `{x_1 = x}` and `V_n(x)` the volume of the cap
//! `{x_1 ≥ x}`. As `n → ∞` they converge uniformly to `ψ_p(x)` and `Ψ_p(-x)`.
//! The Euclidean ball is the case `p = 2`.

use libm::{lgamma as ln_gamma, tgamma as gamma};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use statrs::function::beta::beta_reg;

use crate::error::{domain, Result};
use crate::family::PExponent;
use crate::numeric::{integrate, QuadConfig};
use crate::specfun::{lp_radius, phi, psi_p};

const SECTION_QUAD: QuadConfig = QuadConfig::new(1e-14, 1e-12);

/// Largest dimension for which [`cube_sum_cdf`] uses the exact alternating sum.
pub const IRWIN_HALL_EXACT_MAX_N: usize = 40;

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(domain("dimension n must be at least 1"))
    } else {
        Ok(())
    }
}

fn check_x(x: f64) -> Result<()> {
    if x >= 0.0 {
        Ok(())
    } else {
        Err(domain(format!("section offset must be non-negative, got {x}")))
    }
}

/// Precomputed constants of one `(p, n)` pair.
#[derive(Debug, Clone, Copy)]
struct LpSection {
    p: f64,
    omega: f64,
    exponent: f64,
    scale: f64,
}

impl LpSection {
    fn new(p: PExponent, n: usize) -> Self {
        let p = p.get();
        let nf = n as f64;
        let omega = lp_radius(n, p);
        let scale =
            (ln_gamma(1.0 + nf / p) - ln_gamma(1.0 + (nf - 1.0) / p)).exp() / (2.0 * omega * gamma(1.0 + 1.0 / p));
        Self { p, omega, exponent: (nf - 1.0) / p, scale }
    }

    fn area(&self, x: f64) -> f64 {
        let x = x.abs();
        if x > self.omega {
            return 0.0;
        }
        let base = (1.0 - (x / self.omega).powf(self.p)).max(0.0);
        if self.exponent == 0.0 {
            return self.scale;
        }
        base.powf(self.exponent) * self.scale
    }

    /// `∫_a^b S_n` for `0 ≤ a ≤ b`, split on a geometric mesh so that a narrow
    /// peak near `a` is not missed.
    fn integral(&self, a: f64, b: f64) -> Result<f64> {
        let b = b.min(self.omega);
        if b <= a {
            return Ok(0.0);
        }
        let width = b - a;
        let mut total = 0.0;
        let mut lo = a;
        for k in (0..12).rev() {
            let hi = if k == 0 { b } else { a + width / f64::powi(2.0, k) };
            total += integrate(|t| self.area(t), lo, hi, SECTION_QUAD)?.value;
            lo = hi;
        }
        Ok(total)
    }

    fn tail(&self, x: f64) -> Result<f64> {
        if x >= self.omega {
            return Ok(0.0);
        }
        Ok(self.integral(x, self.omega)?.clamp(0.0, 0.5))
    }
}

/// `S_n(x)`: area of the section `x_1 = x` of the unit-volume `ℓp^n` ball.
pub fn lp_section_area(x: f64, p: PExponent, n: usize) -> Result<f64> {
    check_n(n)?;
    check_x(x)?;
    Ok(LpSection::new(p, n).area(x))
}

/// `V_n(x)`: volume of the cap `x_1 ≥ x` of the unit-volume `ℓp^n` ball.
pub fn lp_tail_volume(x: f64, p: PExponent, n: usize) -> Result<f64> {
    check_n(n)?;
    check_x(x)?;
    LpSection::new(p, n).tail(x)
}

/// Limit density `ψ_p(x) = e^{1/p} exp(-(2Γ(1+1/p) e^{1/p} x)^p)`.
pub fn psi_p_density_limit(x: f64, p: PExponent) -> Result<f64> {
    check_x(x)?;
    let p = p.get();
    let e1p = (1.0 / p).exp();
    Ok(e1p * (-(2.0 * gamma(1.0 + 1.0 / p) * e1p * x).powf(p)).exp())
}

/// Section areas and tail volumes of one `ℓp^n` ball sampled on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectionCurve {
    pub p: f64,
    pub n: usize,
    pub omega_n: f64,
    pub grid: Vec<f64>,
    pub s_values: Vec<f64>,
    pub v_values: Vec<f64>,
}

/// Samples `S_n` and `V_n` on an increasing grid of non-negative offsets.
///
/// Tail volumes are accumulated from the right, one grid cell at a time.
pub fn section_curve(p: PExponent, n: usize, grid: &[f64]) -> Result<SectionCurve> {
    check_n(n)?;
    if grid.iter().any(|&x| !(x >= 0.0)) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(domain("grid must be strictly increasing and non-negative"));
    }
    let sec = LpSection::new(p, n);
    let s_values: Vec<f64> = grid.iter().map(|&x| sec.area(x)).collect();
    let mut v_values = vec![0.0; grid.len()];
    if let Some(&last) = grid.last() {
        let mut v = sec.tail(last)?;
        v_values[grid.len() - 1] = v;
        for i in (0..grid.len().saturating_sub(1)).rev() {
            v += sec.integral(grid[i], grid[i + 1])?;
            v_values[i] = v.clamp(0.0, 0.5);
        }
    }
    Ok(SectionCurve { p: p.get(), n, omega_n: sec.omega, grid: grid.to_vec(), s_values, v_values })
}

/// Distance of one dimension's curves from their limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub omega_n: f64,
    /// `sup_x |V_n(x) - Ψ_p(-x)|` over the grid.
    pub sup_v_gap: f64,
    /// `sup_x |S_n(x) - ψ_p(x)|` over the grid.
    pub sup_s_gap: f64,
}

/// Sup-gaps between `V_n`, `S_n` and their limits for every `n` in `n_list`.
pub fn convergence_report(p: PExponent, n_list: &[usize], grid: &[f64]) -> Result<Vec<ConvergenceRow>> {
    let limit_v: Vec<f64> = grid.iter().map(|&x| psi_p(-x, p)).collect::<Result<_>>()?;
    let limit_s: Vec<f64> = grid.iter().map(|&x| psi_p_density_limit(x, p)).collect::<Result<_>>()?;
    n_list
        .iter()
        .map(|&n| {
            let curve = section_curve(p, n, grid)?;
            let sup_v_gap = curve.v_values.iter().zip(&limit_v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            let sup_s_gap = curve.s_values.iter().zip(&limit_s).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            Ok(ConvergenceRow { n, omega_n: curve.omega_n, sup_v_gap, sup_s_gap })
        })
        .collect()
}

/// Evenly spaced grid `start, start+step, …` up to and including `stop`
/// (within half a step).
pub fn uniform_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
        return Err(domain("grid needs start <= stop and a positive step"));
    }
    let count = ((stop - start) / step + 0.5).floor() as usize;
    Ok((0..=count).map(|i| start + i as f64 * step).collect())
}

/// Geometry of a ball orthogonal to the unit-volume ball of radius `omega`
/// whose nearest point to the origin lies at distance `d/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrthogonalBallGeometry {
    pub d: f64,
    pub omega: f64,
    /// Radius of the orthogonal ball.
    pub r: f64,
    /// Distance from the origin to the orthogonal ball's center.
    pub oa: f64,
    /// Distance from the origin to the plane through the intersection sphere.
    pub oh: f64,
    /// Distance from the origin to the orthogonal ball, `d/2`.
    pub on: f64,
}

pub fn orthogonal_ball_geometry(d: f64, omega: f64) -> Result<OrthogonalBallGeometry> {
    if !(omega > 0.0 && d > 0.0 && d < 2.0 * omega) {
        return Err(domain(format!("need 0 < d < 2·omega, got d = {d}, omega = {omega}")));
    }
    let r = omega * omega / d - d / 4.0;
    let oa = (omega * omega + r * r).sqrt();
    let oh = d / (1.0 + d * d / (4.0 * omega * omega));
    Ok(OrthogonalBallGeometry { d, omega, r, oa, oh, on: d / 2.0 })
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Volume of `{x ∈ [0,1]^n : Σx_i ≤ s}`, the Irwin–Hall CDF.
///
/// Up to [`IRWIN_HALL_EXACT_MAX_N`] the alternating sum
/// `(1/n!) Σ_{j ≤ ⌊s⌋} (-1)^j C(n,j) (s-j)^n` is evaluated in exact rational
/// arithmetic (every finite `f64` is a dyadic rational), so the only rounding
/// is the final conversion. Above it the central-limit approximation with
/// mean `n/2` and variance `n/12` is used.
pub fn cube_sum_cdf(n: usize, s: f64) -> f64 {
    if n == 0 || s.is_nan() {
        return f64::NAN;
    }
    if s <= 0.0 {
        return 0.0;
    }
    if s >= n as f64 {
        return 1.0;
    }
    if n > IRWIN_HALL_EXACT_MAX_N {
        let z = (s - 0.5 * n as f64) / (n as f64 / 12.0).sqrt();
        return phi(z / (2.0 * std::f64::consts::PI).sqrt());
    }
    let s_exact = BigRational::from_float(s).expect("finite s");
    let (num, den) = (s_exact.numer().clone(), s_exact.denom().clone());
    let mut sum = BigInt::zero();
    let mut binom = BigInt::one();
    let top = s.floor() as usize;
    for j in 0..=top.min(n) {
        let shifted = &num - &den * BigInt::from(j);
        let term = &binom * shifted.pow(n as u32);
        if j % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        binom = binom * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    let value = BigRational::new(sum, den.pow(n as u32) * factorial(n));
    value.to_f64().unwrap_or(f64::NAN).clamp(0.0, 1.0)
}

/// `P(√n ⟨u, e⟩ ≤ x)` for `u` uniform on the sphere `S^{n-1}`.
///
/// The coordinate `t = ⟨u, e⟩` has density proportional to
/// `(1 - t²)^{(n-3)/2}`, so `(1 + t)/2` is `Beta((n-1)/2, (n-1)/2)`.
pub fn sphere_projection_cdf(n: usize, x: f64) -> Result<f64> {
    if n < 2 {
        return Err(domain("sphere projection needs n >= 2"));
    }
    if x.is_nan() {
        return Err(domain("argument is NaN"));
    }
    let t = x / (n as f64).sqrt();
    if t <= -1.0 {
        return Ok(0.0);
    }
    if t >= 1.0 {
        return Ok(1.0);
    }
    let a = 0.5 * (n as f64 - 1.0);
    Ok(beta_reg(a, a, 0.5 * (1.0 + t)))
}
