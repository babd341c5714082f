//! Weighted Cesàro and Copson quasi-norms on the half-line, the weight
//! transforms built from them, and closed-form pointwise multiplier norms
//! `M(Cop_r(u), Ces_{p,q}(w, v))` checked against brute-force search.
//!
//! Every quantity lives on `(0, ∞)` and may be `+∞`. Values are computed in
//! the log domain; `0 · ∞ = 0`, `0 / 0 = 0` and `1 / ∞ = 0` throughout.

pub mod error;
pub mod exec;
pub mod exponents;
pub mod gluing;
pub mod multiplier;
pub mod operators;
pub mod oracle;
pub mod realfun;
pub mod spaces;
pub mod suite;

pub use error::{Error, Result};
pub use exponents::{arrow, dual_exponent, Exponent};
pub use realfun::{Interval, QuadratureConfig, RealFun, Weight};

pub use spaces::{space_norm, space_norm3, SpaceKind, SpaceSpec};
