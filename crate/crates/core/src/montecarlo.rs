//! Uniform sampling from unit-volume bodies and randomized numerical checks.
//!
//! Every random quantity is a deterministic function of `(seed, parameters)`.
//! Work is cut into chunks of [`CHUNK`] draws; chunk `c` reads the ChaCha8
//! stream number `c` of the seed, and per-chunk results are combined in chunk
//! order. The rayon thread count therefore never changes a result.

use std::f64::consts::{E, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::gamma_lr;

use crate::error::{domain, Result};
use crate::family::{BodyFamily, PExponent};
use crate::profiles::xlog_power_derivative;
use crate::specfun::{phi, unit_volume_radius};

/// Draws per chunk.
pub const CHUNK: usize = 4096;

/// Central-difference step.
pub const FD_STEP: f64 = 1e-6;

/// Points closer than this to a kink of a cut-off function are skipped.
pub const KINK_RADIUS: f64 = 1e-4;

const Z95: f64 = 1.96;

fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Independent seed for a named sub-experiment.
fn subseed(seed: u64, tag: u64) -> u64 {
    seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn chunk_ranges(count: usize) -> Vec<(u64, usize)> {
    (0..count.div_ceil(CHUNK)).map(|c| (c as u64, CHUNK.min(count - c * CHUNK))).collect()
}

/// Runs `f` on each chunk in parallel and returns the results in chunk order.
fn map_chunks<T: Send>(count: usize, seed: u64, f: impl Fn(&mut ChaCha8Rng, usize) -> T + Sync) -> Vec<T> {
    chunk_ranges(count).into_par_iter().map(|(c, len)| f(&mut stream(seed, c), len)).collect()
}

/// Proportion or mean estimate with a 95% normal-approximation half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateWithCI {
    pub estimate: f64,
    pub half_width_95: f64,
    pub samples: u64,
}

impl EstimateWithCI {
    /// `1.96 √(p̂(1-p̂)/N)`.
    pub fn proportion(hits: u64, samples: u64) -> Self {
        let p = hits as f64 / samples as f64;
        Self { estimate: p, half_width_95: Z95 * (p * (1.0 - p) / samples as f64).sqrt(), samples }
    }

    /// Sample mean with `1.96 s/√N`.
    pub fn mean(sum: f64, sum_sq: f64, samples: u64) -> Self {
        let n = samples as f64;
        let mean = sum / n;
        let var = if samples > 1 { ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
        Self { estimate: mean, half_width_95: Z95 * (var / n).sqrt(), samples }
    }

    pub fn contains(&self, value: f64) -> bool {
        (self.estimate - value).abs() <= self.half_width_95
    }
}

enum Sampler {
    Cube,
    Simplex { omega: f64 },
    Lp { p: f64, omega: f64, radial: Gamma<f64> },
}

impl Sampler {
    fn new(family: BodyFamily, n: usize) -> Result<Self> {
        let omega = unit_volume_radius(family, n)?.omega_n;
        Ok(match family {
            BodyFamily::Cube => Sampler::Cube,
            BodyFamily::Simplex => Sampler::Simplex { omega },
            BodyFamily::Ball => Self::lp(2.0, omega),
            BodyFamily::Lp(p) => Self::lp(p.get(), omega),
        })
    }

    fn lp(p: f64, omega: f64) -> Self {
        Sampler::Lp { p, omega, radial: Gamma::new(1.0 / p, 1.0).expect("valid shape") }
    }

    /// Coordinate-wise centre of the body.
    fn centroid(&self, n: usize) -> f64 {
        match self {
            Sampler::Cube => 0.5,
            Sampler::Simplex { omega } => omega / n as f64,
            Sampler::Lp { .. } => 0.0,
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        match self {
            Sampler::Cube => out.iter_mut().for_each(|x| *x = rng.random::<f64>()),
            Sampler::Simplex { omega } => {
                // Normalized exponentials are uniform on the standard simplex.
                out.iter_mut().for_each(|x| *x = Exp1.sample(rng));
                let s: f64 = out.iter().sum();
                out.iter_mut().for_each(|x| *x *= omega / s);
            }
            Sampler::Lp { p, omega, radial } => {
                // Generalized-Gaussian direction, radius U^{1/n}.
                for x in out.iter_mut() {
                    let g: f64 = radial.sample(rng);
                    let mag = g.powf(1.0 / p);
                    *x = if rng.random::<bool>() { mag } else { -mag };
                }
                let norm = out.iter().map(|x| x.abs().powf(*p)).sum::<f64>().powf(1.0 / p);
                let u: f64 = rng.random();
                let scale = omega * u.powf(1.0 / out.len() as f64) / norm;
                out.iter_mut().for_each(|x| *x *= scale);
            }
        }
    }
}

/// Uniform points in a unit-volume body, stored row-major.
///
/// The cube is `[0, 1]^n`, the simplex is `{x ≥ 0, Σx = ω_n}` in `n`
/// coordinates, and `ℓp` balls are centred at the origin with radius `ω_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleBatch {
    pub family: BodyFamily,
    pub n: usize,
    pub count: usize,
    pub seed: u64,
    pub points: Vec<f64>,
}

impl SampleBatch {
    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.n..(i + 1) * self.n]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks_exact(self.n)
    }
}

pub fn sample_uniform(family: BodyFamily, n: usize, count: usize, seed: u64) -> Result<SampleBatch> {
    if count == 0 {
        return Err(domain("sample count must be at least 1"));
    }
    let sampler = Sampler::new(family, n)?;
    let chunks = map_chunks(count, seed, |rng, len| {
        let mut buf = vec![0.0; len * n];
        for row in buf.chunks_exact_mut(n) {
            sampler.draw(rng, row);
        }
        buf
    });
    Ok(SampleBatch { family, n, count, seed, points: chunks.concat() })
}

/// Fraction of uniform draws from the body satisfying `pred`, streamed
/// without storing the points.
pub fn estimate_fraction(
    family: BodyFamily,
    n: usize,
    count: usize,
    seed: u64,
    pred: impl Fn(&[f64]) -> bool + Sync,
) -> Result<EstimateWithCI> {
    if count == 0 {
        return Err(domain("sample count must be at least 1"));
    }
    let sampler = Sampler::new(family, n)?;
    let hits: u64 = map_chunks(count, seed, |rng, len| {
        let mut row = vec![0.0; n];
        (0..len)
            .filter(|_| {
                sampler.draw(rng, &mut row);
                pred(&row)
            })
            .count() as u64
    })
    .into_iter()
    .sum();
    Ok(EstimateWithCI::proportion(hits, count as u64))
}

/// Fraction of the body with `x_1 - c_1 ≥ a`, `c` the centroid.
pub fn estimate_cap_volume(family: BodyFamily, n: usize, a: f64, count: usize, seed: u64) -> Result<EstimateWithCI> {
    let centre = Sampler::new(family, n)?.centroid(n);
    estimate_fraction(family, n, count, seed, |x| x[0] - centre >= a)
}

/// One line of a check suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub checked: u64,
    pub skipped: u64,
    pub violations: u64,
    /// Largest observed value of the checked quantity (ratio, gap or
    /// statistic; see `name`).
    pub worst: f64,
}

impl CheckLine {
    fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), checked: 0, skipped: 0, violations: 0, worst: f64::NEG_INFINITY }
    }

    fn record(&mut self, ok: bool, value: f64) {
        self.checked += 1;
        if !ok {
            self.violations += 1;
        }
        if value > self.worst {
            self.worst = value;
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0 && self.checked > 0
    }
}

/// `T(x) = x / ‖x‖₁` on the open positive orthant.
pub fn t_map(x: &[f64]) -> Result<Vec<f64>> {
    if x.iter().any(|&v| !(v > 0.0)) {
        return Err(domain("t_map needs strictly positive coordinates"));
    }
    let s: f64 = x.iter().sum();
    if s < 1e-9 {
        return Err(domain("t_map input is too close to the origin"));
    }
    Ok(x.iter().map(|v| v / s).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LipschitzCheck {
    /// Operator norm of the exact Jacobian, by power iteration.
    pub opnorm: f64,
    /// Operator norm of the central-difference Jacobian.
    pub fd_opnorm: f64,
    /// `(1/‖x‖₁)(1 + √n ‖T(x)‖₂)`.
    pub bound: f64,
    pub ok: bool,
}

/// Largest singular value of the linear map `apply` (with adjoint
/// `adjoint`) by power iteration on `AᵀA`.
fn power_opnorm(n: usize, apply: impl Fn(&[f64]) -> Vec<f64>, adjoint: impl Fn(&[f64]) -> Vec<f64>) -> f64 {
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.37 * i as f64 - if i % 2 == 1 { 0.9 } else { 0.0 }).collect();
    let mut sigma = 0.0;
    for _ in 0..5000 {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        v.iter_mut().for_each(|x| *x /= norm);
        let av = apply(&v);
        let next = av.iter().map(|x| x * x).sum::<f64>().sqrt();
        let converged = (next - sigma).abs() <= 1e-15 * next;
        sigma = next;
        if converged {
            break;
        }
        v = adjoint(&av);
    }
    sigma
}

fn dense_opnorm(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    power_opnorm(
        n,
        |v| m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect(),
        |w| (0..n).map(|j| (0..n).map(|i| m[i][j] * w[i]).sum()).collect(),
    )
}

/// Compares the Jacobian of `T` at `x` with the bound
/// `(1/‖x‖₁)(1 + √n ‖T(x)‖₂)`.
///
/// The exact Jacobian is `J_ij = (δ_ij - T_i(x))/‖x‖₁`. The central-difference
/// Jacobian uses a step of `FD_STEP` relative to each coordinate, which keeps
/// the perturbed points inside the orthant.
pub fn t_map_lipschitz_check(x: &[f64]) -> Result<LipschitzCheck> {
    let t = t_map(x)?;
    let n = x.len();
    let s: f64 = x.iter().sum();
    let opnorm = power_opnorm(
        n,
        |v| {
            let total: f64 = v.iter().sum();
            v.iter().zip(&t).map(|(vi, ti)| (vi - ti * total) / s).collect()
        },
        |w| {
            let proj: f64 = w.iter().zip(&t).map(|(a, b)| a * b).sum();
            w.iter().map(|wi| (wi - proj) / s).collect()
        },
    );
    let mut fd = vec![vec![0.0; n]; n];
    let mut probe = x.to_vec();
    for j in 0..n {
        let h = FD_STEP * x[j];
        probe[j] = x[j] + h;
        let plus = t_map(&probe)?;
        probe[j] = x[j] - h;
        let minus = t_map(&probe)?;
        probe[j] = x[j];
        for i in 0..n {
            fd[i][j] = (plus[i] - minus[i]) / (2.0 * h);
        }
    }
    let fd_opnorm = dense_opnorm(&fd);
    let t_norm = t.iter().map(|v| v * v).sum::<f64>().sqrt();
    let bound = (1.0 + (n as f64).sqrt() * t_norm) / s;
    let ok = opnorm <= bound * (1.0 + 1e-6) && fd_opnorm <= bound * (1.0 + 1e-6);
    Ok(LipschitzCheck { opnorm, fd_opnorm, bound, ok })
}

fn l2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn l1(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

/// `h₁(x) = max(0, min(1, 2 - c₁√n ‖x‖₂))`, equal to one near the origin.
pub fn cutoff_h1(x: &[f64], c1: f64) -> f64 {
    (2.0 - c1 * (x.len() as f64).sqrt() * l2(x)).clamp(0.0, 1.0)
}

/// `h₂(x) = max(0, min(1, c₂ ‖x‖₁ / n - 1))`, equal to zero near the origin.
pub fn cutoff_h2(x: &[f64], c2: f64) -> f64 {
    (c2 * l1(x) / x.len() as f64 - 1.0).clamp(0.0, 1.0)
}

/// Central-difference gradient with absolute step [`FD_STEP`].
pub fn fd_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64]) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|j| {
            probe[j] = x[j] + FD_STEP;
            let plus = f(&probe);
            probe[j] = x[j] - FD_STEP;
            let minus = f(&probe);
            probe[j] = x[j];
            (plus - minus) / (2.0 * FD_STEP)
        })
        .collect()
}

/// Whether `x` is at least [`KINK_RADIUS`] away from every kink of `h₁`.
pub fn h1_smooth_at(x: &[f64], c1: f64) -> bool {
    let r = l2(x);
    let unit = 1.0 / (c1 * (x.len() as f64).sqrt());
    r > KINK_RADIUS && (r - unit).abs() > KINK_RADIUS && (r - 2.0 * unit).abs() > KINK_RADIUS
}

/// Whether `x` is at least [`KINK_RADIUS`] away from every kink of `h₂`,
/// including the coordinate hyperplanes where `‖·‖₁` bends.
pub fn h2_smooth_at(x: &[f64], c2: f64) -> bool {
    let n = x.len() as f64;
    let level = n / c2;
    // Distance to {‖y‖₁ = L} is at least |‖x‖₁ - L| / √n.
    let gap = KINK_RADIUS * n.sqrt();
    let s = l1(x);
    x.iter().all(|v| v.abs() > KINK_RADIUS) && (s - level).abs() > gap && (s - 2.0 * level).abs() > gap
}

/// Plateau sets of `h₁` and `h₂`, compared in exact arithmetic.
///
/// With dyadic coordinates, a power-of-two `c` and `n` a perfect square every
/// floating-point step below is exact or monotonically rounded across a
/// representable threshold, so the iff-statements must hold without slack.
pub fn cutoff_plateau_check(points: &[Vec<f64>], c: f64) -> Result<CheckLine> {
    if c <= 0.0 || c.log2().fract() != 0.0 {
        return Err(domain("plateau checks need c to be a power of two"));
    }
    let mut line = CheckLine::new("cutoff plateaus");
    for x in points {
        let n = x.len() as f64;
        if n.sqrt().fract() != 0.0 {
            return Err(domain("plateau checks need n to be a perfect square"));
        }
        let sq: f64 = x.iter().map(|v| v * v).sum();
        let scale = c * c * n;
        let h1 = cutoff_h1(x, c);
        let ok1 = (h1 == 1.0) == (scale * sq <= 1.0) && (h1 == 0.0) == (scale * sq >= 4.0);
        let ratio = c * l1(x) / n;
        let h2 = cutoff_h2(x, c);
        let ok2 = (h2 == 0.0) == (ratio <= 1.0) && (h2 == 1.0) == (ratio >= 2.0);
        line.record(ok1 && ok2, 0.0);
    }
    Ok(line)
}

/// Draws points whose norm spreads over `[0, 3·unit]`, covering both plateaus
/// and the ramp of a cut-off function.
fn ramp_points(rng: &mut ChaCha8Rng, n: usize, count: usize, unit_l2: f64) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| {
            let mut v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
            let r = 3.0 * unit_l2 * rng.random::<f64>() / l2(&v);
            v.iter_mut().for_each(|x| *x *= r);
            v
        })
        .collect()
}

/// Central-difference gradient norms of `h₁`, `h₂` against `c₁√n`, `c₂/√n`.
pub fn cutoff_gradient_check(n: usize, c1: f64, c2: f64, count: usize, seed: u64) -> Vec<CheckLine> {
    let mut rng = stream(subseed(seed, 21), 0);
    let nf = n as f64;
    let mut g1 = CheckLine::new(format!("h1 gradient <= c1 sqrt(n) (n={n}, c1={c1})"));
    for x in ramp_points(&mut rng, n, count, 1.0 / (c1 * nf.sqrt())) {
        if !h1_smooth_at(&x, c1) {
            g1.skipped += 1;
            continue;
        }
        let g = l2(&fd_gradient(|y| cutoff_h1(y, c1), &x));
        let bound = c1 * nf.sqrt();
        g1.record(g <= bound * (1.0 + 1e-5), g / bound);
    }
    let mut g2 = CheckLine::new(format!("h2 gradient <= c2/sqrt(n) (n={n}, c2={c2})"));
    // Points with ‖x‖₁ spread over [0, 3n/c2]; their ℓ2 norm is about ‖x‖₁/√n.
    for x in ramp_points(&mut rng, n, count, 3.0 * nf.sqrt() / (c2 * 2.0)) {
        if !h2_smooth_at(&x, c2) {
            g2.skipped += 1;
            continue;
        }
        let g = l2(&fd_gradient(|y| cutoff_h2(y, c2), &x));
        let bound = c2 / nf.sqrt();
        g2.record(g <= bound * (1.0 + 1e-5), g / bound);
    }
    vec![g1, g2]
}

/// Checks `‖∇k‖ ≥ ‖∇(kh)‖ - ‖∇h‖` by central differences at `points`, for
/// `k, h` with values in `[0, 1]`. Returns the number of violations beyond
/// `1e-5` and the smallest slack seen.
pub fn cutoff_product_check(k: impl Fn(&[f64]) -> f64, h: impl Fn(&[f64]) -> f64, points: &[Vec<f64>]) -> (u64, f64) {
    let mut violations = 0;
    let mut min_slack = f64::INFINITY;
    for x in points {
        let gk = l2(&fd_gradient(&k, x));
        let gh = l2(&fd_gradient(&h, x));
        let gkh = l2(&fd_gradient(|y| k(y) * h(y), x));
        let slack = gk - (gkh - gh);
        if slack < -1e-5 {
            violations += 1;
        }
        min_slack = min_slack.min(slack);
    }
    (violations, min_slack)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpTailCheck {
    pub n: usize,
    pub alpha: f64,
    pub mc: EstimateWithCI,
    /// Erlang CDF `P(Σ_{i≤n} E_i ≤ αn)`.
    pub erlang_exact: f64,
    /// `(αe)^n / √(2πn)`.
    pub bound: f64,
    pub bound_holds: bool,
    /// Whether the exact value lies in the 95% interval around the estimate.
    pub mc_agrees: bool,
}

/// `P(‖x‖₁ ≤ αn)` under the product exponential measure: Monte Carlo, the
/// exact Erlang value and the bound `(αe)^n/√(2πn)`.
pub fn exp_tail_check(n: usize, alpha: f64, count: usize, seed: u64) -> Result<ExpTailCheck> {
    if n == 0 || !(alpha >= 0.0) || count == 0 {
        return Err(domain("need n >= 1, alpha >= 0 and a positive sample count"));
    }
    let threshold = alpha * n as f64;
    let erlang_exact = if threshold == 0.0 { 0.0 } else { gamma_lr(n as f64, threshold) };
    let bound = (alpha * E).powi(n as i32) / (2.0 * PI * n as f64).sqrt();
    let hits: u64 = map_chunks(count, seed, |rng, len| {
        (0..len).filter(|_| (0..n).map(|_| -> f64 { Exp1.sample(rng) }).sum::<f64>() <= threshold).count() as u64
    })
    .into_iter()
    .sum();
    let mc = EstimateWithCI::proportion(hits, count as u64);
    // A zero-width interval (no hits) still admits the one-count resolution.
    let tolerance = mc.half_width_95.max(1.0 / count as f64);
    Ok(ExpTailCheck {
        n,
        alpha,
        mc,
        erlang_exact,
        bound,
        bound_holds: erlang_exact <= bound,
        mc_agrees: (mc.estimate - erlang_exact).abs() <= tolerance,
    })
}

/// Applies `Φ` coordinatewise, carrying the measure with density
/// `e^{-π‖x‖²}` to the uniform measure on the cube.
pub fn gaussian_to_cube_map(points: &[f64]) -> Vec<f64> {
    points.iter().map(|&x| phi(x)).collect()
}

/// Draws from the density `e^{-π‖x‖²}`: standard normals scaled by `1/√(2π)`.
pub fn sample_gamma_measure(n: usize, count: usize, seed: u64) -> Vec<f64> {
    let scale = 1.0 / (2.0 * PI).sqrt();
    map_chunks(count, seed, |rng, len| {
        (0..len * n).map(|_| scale * Distribution::<f64>::sample(&StandardNormal, rng)).collect::<Vec<f64>>()
    })
    .concat()
}

/// One-sample Kolmogorov–Smirnov statistic against the uniform law on `[0, 1]`.
pub fn ks_uniform(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len() as f64;
    values.iter().enumerate().map(|(i, &u)| ((i + 1) as f64 / n - u).max(u - i as f64 / n)).fold(0.0, f64::max)
}

/// Asymptotic 1% critical value of the KS statistic.
pub fn ks_critical_1pct(count: usize) -> f64 {
    1.628 / (count as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransferCheck {
    pub n: usize,
    pub count: usize,
    pub ks_max: f64,
    pub ks_critical: f64,
    pub ks_pass: bool,
    /// Largest `‖φ(x) - φ(y)‖ / ‖x - y‖` over sampled pairs.
    pub lipschitz_max: f64,
    pub lipschitz_pass: bool,
}

/// Pushes `count` draws of the Gaussian measure through the coordinatewise
/// `Φ` map, tests each coordinate for uniformity and bounds difference
/// quotients along random pairs.
pub fn transfer_check(n: usize, count: usize, seed: u64) -> Result<TransferCheck> {
    if n == 0 || count < 2 {
        return Err(domain("need n >= 1 and at least two samples"));
    }
    let x = sample_gamma_measure(n, count, seed);
    let u = gaussian_to_cube_map(&x);
    let ks_max = (0..n)
        .map(|j| {
            let mut col: Vec<f64> = u.iter().skip(j).step_by(n).copied().collect();
            ks_uniform(&mut col)
        })
        .fold(0.0, f64::max);
    let ks_critical = ks_critical_1pct(count);

    // Pairs: consecutive draws, plus short random directions from each draw.
    let mut rng = stream(subseed(seed, 31), 0);
    let mut lipschitz_max: f64 = 0.0;
    for i in 0..count - 1 {
        let (a, b) = (&x[i * n..(i + 1) * n], &x[(i + 1) * n..(i + 2) * n]);
        let (fa, fb) = (&u[i * n..(i + 1) * n], &u[(i + 1) * n..(i + 2) * n]);
        let diff: Vec<f64> = a.iter().zip(b).map(|(p, q)| p - q).collect();
        let fdiff: Vec<f64> = fa.iter().zip(fb).map(|(p, q)| p - q).collect();
        let d = l2(&diff);
        if d > 0.0 {
            lipschitz_max = lipschitz_max.max(l2(&fdiff) / d);
        }
        let dir: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let step = 1e-3 / l2(&dir);
        let moved: Vec<f64> = a.iter().zip(&dir).map(|(p, v)| phi(p + step * v)).collect();
        let fd: Vec<f64> = moved.iter().zip(fa).map(|(p, q)| p - q).collect();
        lipschitz_max = lipschitz_max.max(l2(&fd) / 1e-3);
    }
    Ok(TransferCheck {
        n,
        count,
        ks_max,
        ks_critical,
        ks_pass: ks_max < ks_critical,
        lipschitz_max,
        lipschitz_pass: lipschitz_max <= 1.0 + 1e-6,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AverageDistance {
    pub n: usize,
    pub mean_distance: EstimateWithCI,
    /// `√(n/(2πe))`.
    pub lower_bound: f64,
}

/// Mean Euclidean distance between independent uniform points of `[0, 1]^n`.
pub fn average_distance_experiment(n: usize, count: usize, seed: u64) -> Result<AverageDistance> {
    if n == 0 || count == 0 {
        return Err(domain("need n >= 1 and a positive sample count"));
    }
    let parts = map_chunks(count, seed, |rng, len| {
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for _ in 0..len {
            let d2: f64 = (0..n)
                .map(|_| {
                    let t = rng.random::<f64>() - rng.random::<f64>();
                    t * t
                })
                .sum();
            sum += d2.sqrt();
            sum_sq += d2;
        }
        (sum, sum_sq)
    });
    let (sum, sum_sq) = parts.into_iter().fold((0.0, 0.0), |(a, b), (c, d)| (a + c, b + d));
    Ok(AverageDistance {
        n,
        mean_distance: EstimateWithCI::mean(sum, sum_sq, count as u64),
        lower_bound: (n as f64 / (2.0 * PI * E)).sqrt(),
    })
}

/// Positivity of `d/dx [x(-ln x)^{1-1/p}]` on `(0, 1/2]` and agreement of
/// the closed-form derivative with central differences (relative `1e-5`).
pub fn xlog_derivative_check(count: usize, seed: u64) -> Result<Vec<CheckLine>> {
    let mut rng = stream(subseed(seed, 41), 0);
    let mut positive = CheckLine::new("xlog derivative positive");
    let mut agree = CheckLine::new("xlog derivative vs central difference (relative gap)");
    for _ in 0..count {
        // Log-uniform x in [1e-12, 1/2], uniform p in [1, 2].
        let x = 0.5 * (rng.random::<f64>() * (1e-12f64 / 0.5).ln()).exp();
        let p = PExponent::new(1.0 + rng.random::<f64>())?;
        let d = xlog_power_derivative(x, p)?;
        positive.record(d > 0.0, -d);
        let f = |t: f64| t * (-t.ln()).powf(1.0 - 1.0 / p.get());
        let h = FD_STEP * x;
        let fd = (f(x + h) - f(x - h)) / (2.0 * h);
        let gap = (fd - d).abs() / d.abs();
        agree.record(gap <= 1e-5, gap);
    }
    Ok(vec![positive, agree])
}

/// Log-uniform positive point with coordinates in `[1e-3, 1e3]`.
fn log_uniform_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| 10f64.powf(6.0 * rng.random::<f64>() - 3.0)).collect()
}

/// Dyadic points on a grid of step `1/64` in `[-2, 2]^n`.
fn dyadic_points(rng: &mut ChaCha8Rng, n: usize, count: usize) -> Vec<Vec<f64>> {
    (0..count).map(|_| (0..n).map(|_| rng.random_range(-128i32..=128) as f64 / 64.0).collect()).collect()
}

/// The lemma checks behind the simplex bound: Lipschitz constant of `T`,
/// cut-off plateaus and gradients, the product inequality and the
/// exponential-tail bound.
///
/// `samples` sets the Monte Carlo size of each exponential-tail estimate; the
/// fuzz corpora have fixed sizes.
pub fn sodin_suite(n: usize, samples: usize, seed: u64) -> Result<Vec<CheckLine>> {
    if n < 2 {
        return Err(domain("the lemma suite needs n >= 2"));
    }
    let mut lines = Vec::new();

    let mut lip = CheckLine::new("T Lipschitz: opnorm / bound");
    let mut dims = vec![2, 5, n];
    dims.dedup();
    for (i, &d) in dims.iter().enumerate() {
        let mut rng = stream(subseed(seed, 11), i as u64);
        for _ in 0..10_000 {
            let x = log_uniform_point(&mut rng, d);
            let c = t_map_lipschitz_check(&x)?;
            lip.record(c.ok, c.fd_opnorm.max(c.opnorm) / c.bound);
        }
    }
    lines.push(lip);

    let mut rng = stream(subseed(seed, 12), 0);
    let mut plateau = CheckLine::new("cutoff plateaus (exact)");
    for (dim, c) in [(1, 1.0), (4, 0.5), (4, 1.0), (16, 0.25), (16, 2.0)] {
        let part = cutoff_plateau_check(&dyadic_points(&mut rng, dim, 2000), c)?;
        plateau.checked += part.checked;
        plateau.violations += part.violations;
    }
    plateau.worst = 0.0;
    lines.push(plateau);

    for (c1, c2) in [(1.0, 1.0), (0.5, 2.0)] {
        lines.extend(cutoff_gradient_check(n, c1, c2, 10_000, seed));
    }

    let mut product = CheckLine::new("product rule: worst negative slack");
    let nf = n as f64;
    let (c1, c2) = (1.0, 1.0);
    let smooth = |y: &[f64]| (-l2(y).powi(2)).exp();
    let h1 = |y: &[f64]| cutoff_h1(y, c1);
    let h2 = |y: &[f64]| cutoff_h2(y, c2);
    let mut rng = stream(subseed(seed, 13), 0);
    let near = ramp_points(&mut rng, n, 1000, 1.0 / (c1 * nf.sqrt()));
    let far = ramp_points(&mut rng, n, 1000, 3.0 * nf.sqrt() / (c2 * 2.0));
    let ok = |x: &Vec<f64>| h1_smooth_at(x, c1) && h2_smooth_at(x, c2);
    for pts in [near, far] {
        let pts: Vec<Vec<f64>> = pts.into_iter().filter(ok).collect();
        let runs = [
            cutoff_product_check(h1, h2, &pts),
            cutoff_product_check(h2, h1, &pts),
            cutoff_product_check(smooth, h1, &pts),
            cutoff_product_check(h2, smooth, &pts),
        ];
        for (violations, slack) in runs {
            product.checked += pts.len() as u64;
            product.violations += violations;
            product.worst = product.worst.max(-slack);
        }
    }
    lines.push(product);

    let mut bound = CheckLine::new("exp tail: Erlang / bound");
    for m in 1..=20 {
        for a in 1..=7 {
            let alpha = 0.05 * a as f64;
            let erlang = gamma_lr(m as f64, alpha * m as f64);
            let b = (alpha * E).powi(m) / (2.0 * PI * m as f64).sqrt();
            bound.record(erlang <= b, erlang / b);
        }
    }
    lines.push(bound);

    let mut mc = CheckLine::new("exp tail: |MC - Erlang| / tolerance");
    for m in 1..=10usize {
        let r = exp_tail_check(m, 0.2, samples, subseed(seed, 100 + m as u64))?;
        let tol = r.mc.half_width_95.max(1.0 / samples as f64);
        mc.record(r.mc_agrees, (r.mc.estimate - r.erlang_exact).abs() / tol);
    }
    lines.push(mc);
    Ok(lines)
}
