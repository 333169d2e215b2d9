//! Dimension-free bounds on the largest distance between two subsets of a
//! prescribed volume inside unit-volume convex bodies.
//!
//! The crate covers Euclidean balls, cubes, regular simplices and `ℓp` balls
//! with `p ∈ [1, 2]`. Upper bounds come from integrating an isoperimetric
//! profile from the target volume up to one half ([`enlargement`]); lower bounds
//! come from explicit pairs of regions ([`witness`]). Everything the bounds rest
//! on can be checked numerically: the special functions in [`specfun`], the
//! cross-section limits in [`sections`], the discrete lattice picture in
//! [`lattice`], and the transfer-map lemmas in [`montecarlo`].

// `!(x > 0.0)` is used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod enlargement;
pub mod error;
pub mod family;
pub mod lattice;
pub mod montecarlo;
pub mod numeric;
pub mod profiles;
pub mod sections;
pub mod specfun;
pub mod witness;

pub use error::{Error, Result};
pub use family::{BodyFamily, ConstantsConfig, PExponent};
