use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Exponent of an `ℓp` ball, restricted to `1 ≤ p ≤ 2`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct PExponent(f64);

impl PExponent {
    pub fn new(p: f64) -> Result<Self> {
        if (1.0..=2.0).contains(&p) {
            Ok(Self(p))
        } else {
            Err(domain(format!("p must lie in [1, 2], got {p}")))
        }
    }

    pub const ONE: PExponent = PExponent(1.0);
    pub const TWO: PExponent = PExponent(2.0);

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for PExponent {
    type Error = Error;
    fn try_from(p: f64) -> Result<Self> {
        Self::new(p)
    }
}

impl From<PExponent> for f64 {
    fn from(p: PExponent) -> f64 {
        p.0
    }
}

/// The convex body families the bounds are stated for.
///
/// The cross-polytope is `Lp(1)`; there is no separate variant for it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "p", rename_all = "lowercase")]
pub enum BodyFamily {
    Ball,
    Cube,
    Simplex,
    Lp(PExponent),
}

impl BodyFamily {
    /// Families whose bounds depend on unpinned universal constants.
    pub fn is_parametric(self) -> bool {
        match self {
            BodyFamily::Ball | BodyFamily::Cube => false,
            BodyFamily::Simplex => true,
            // The unit-volume l2 ball is the Euclidean ball.
            BodyFamily::Lp(p) => p.get() != 2.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BodyFamily::Ball => "ball",
            BodyFamily::Cube => "cube",
            BodyFamily::Simplex => "simplex",
            BodyFamily::Lp(_) => "lp",
        }
    }

    pub fn p(self) -> Option<f64> {
        match self {
            BodyFamily::Lp(p) => Some(p.get()),
            _ => None,
        }
    }

    /// Builds a family from its CLI name and an optional exponent.
    pub fn from_parts(name: &str, p: Option<f64>) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "ball" => Ok(BodyFamily::Ball),
            "cube" => Ok(BodyFamily::Cube),
            "simplex" => Ok(BodyFamily::Simplex),
            "cross-polytope" | "crosspolytope" | "hyperoctahedron" => Ok(BodyFamily::Lp(PExponent::ONE)),
            "lp" => {
                let p = p.ok_or_else(|| domain("family lp needs --p"))?;
                Ok(BodyFamily::Lp(PExponent::new(p)?))
            }
            other => Err(domain(format!("unknown body family '{other}'"))),
        }
    }
}

impl fmt::Display for BodyFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BodyFamily::Lp(p) => write!(f, "lp({})", p.get()),
            other => f.write_str(other.name()),
        }
    }
}

/// Universal constants whose existence is proven but whose values are not
/// known. Every default is a placeholder of `1.0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsConfig {
    /// Linear isoperimetric constant of the simplex.
    pub c_lambda: f64,
    /// Isoperimetric constant of the `ℓp` ball when no per-`p` entry matches.
    pub c_iso_default: f64,
    /// Per-exponent overrides for the `ℓp` constant, as `(p, c)` pairs.
    pub c_iso_overrides: Vec<(f64, f64)>,
    pub c_s: f64,
    pub c_b: f64,
    pub small_set_threshold_c: f64,
    pub sz_t: f64,
    pub sz_c: f64,
}

impl Default for ConstantsConfig {
    fn default() -> Self {
        Self {
            c_lambda: 1.0,
            c_iso_default: 1.0,
            c_iso_overrides: Vec::new(),
            c_s: 1.0,
            c_b: 1.0,
            small_set_threshold_c: 1.0,
            sz_t: 1.0,
            sz_c: 1.0,
        }
    }
}

impl ConstantsConfig {
    /// `ℓp` isoperimetric constant for exponent `p`.
    pub fn c_iso(&self, p: PExponent) -> f64 {
        self.c_iso_overrides.iter().find(|(q, _)| *q == p.get()).map(|&(_, c)| c).unwrap_or(self.c_iso_default)
    }

    /// Same constants with `c_iso(1)` forced equal to `c_lambda`, which makes
    /// the `ℓ1` forms coincide with the simplex forms.
    pub fn matched_l1(&self) -> Self {
        let mut out = self.clone();
        out.c_iso_overrides.retain(|(q, _)| *q != 1.0);
        out.c_iso_overrides.push((1.0, self.c_lambda));
        out
    }

    pub fn validate(&self) -> Result<()> {
        let scalars = [
            ("c_lambda", self.c_lambda),
            ("c_iso", self.c_iso_default),
            ("c_s", self.c_s),
            ("c_b", self.c_b),
            ("small_set_threshold_C", self.small_set_threshold_c),
            ("sz_T", self.sz_t),
            ("sz_c", self.sz_c),
        ];
        for (name, v) in scalars {
            if !(v.is_finite() && v > 0.0) {
                return Err(domain(format!("constant {name} must be positive, got {v}")));
            }
        }
        for &(p, c) in &self.c_iso_overrides {
            PExponent::new(p)?;
            if !(c.is_finite() && c > 0.0) {
                return Err(domain(format!("constant c_iso@{p} must be positive, got {c}")));
            }
        }
        Ok(())
    }

    /// Parses `key=value` lines on top of the defaults.
    ///
    /// Blank lines and `#` comments are skipped. Per-exponent `ℓp` constants
    /// are written `c_iso@1.5=0.8`.
    /// Sets one constant by its config-file key (`c_lambda`, `c_iso`,
    /// `c_iso@<p>`, `c_s`, `c_b`, `small_set_threshold_C`, `sz_T`, `sz_c`).
    /// The value is not validated; call [`ConstantsConfig::validate`].
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        if let Some(p) = key.strip_prefix("c_iso@") {
            let p: f64 = p.parse().map_err(|_| Error::Parse(format!("bad exponent '{p}'")))?;
            self.c_iso_overrides.retain(|(q, _)| *q != p);
            self.c_iso_overrides.push((p, value));
            return Ok(());
        }
        match key {
            "c_lambda" => self.c_lambda = value,
            "c_iso" => self.c_iso_default = value,
            "c_s" => self.c_s = value,
            "c_b" => self.c_b = value,
            "small_set_threshold_C" | "small_set_threshold_c" => self.small_set_threshold_c = value,
            "sz_T" | "sz_t" => self.sz_t = value,
            "sz_c" => self.sz_c = value,
            other => return Err(Error::Parse(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| Error::Parse(format!("line {}: expected key=value", lineno + 1)))?;
            let key = key.trim();
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad number '{}'", lineno + 1, value.trim())))?;
            cfg.set(key, value).map_err(|e| match e {
                Error::Parse(msg) => Error::Parse(format!("line {}: {msg}", lineno + 1)),
                other => other,
            })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl FromStr for ConstantsConfig {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}
