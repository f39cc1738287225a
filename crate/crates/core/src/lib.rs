//! Numerical toolkit for (α₁,α₂)-Minkowski norms and homogeneous
//! (α₁,α₂)-Finsler metrics on compact Lie groups.
//!
//! * [`family`] and [`norm`]: generating profiles φ, ψ, L, validity, the
//!   fundamental and Cartan tensors, mean torsion, with finite-difference
//!   oracles.
//! * [`lie`]: su(n) structure constants, centralizers, adjoint orbits.
//! * [`roots`]: root systems in exact arithmetic and the four-roots scan.
//! * [`homogeneous`]: S-curvature of left-invariant metrics, closed form
//!   and oracle, plus the vanishing criterion.
//! * [`kvfcl`]: sampling tests for Killing fields of constant length.

pub mod error;
pub mod expr;
pub mod family;
pub mod field;
pub mod homogeneous;
pub mod kvfcl;
pub mod lie;
pub mod norm;
pub mod roots;

pub use error::{Error, Result};
