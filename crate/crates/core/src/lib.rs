//! Iterated period integrals of cusp forms on SL₂(ℤ).
//!
//! The crate computes the noncommutative generating series of iterated
//! integrals of cusp forms, the cocycles built from them with values in the
//! unit group of a truncated free algebra, (multiple) L-values, and the
//! degree-by-degree reconstruction of cusp-form collections from cocycles.
//!
//! Layout:
//! - [`algebra`]: SL₂(ℤ) arithmetic, alphabets and monomials, truncated
//!   noncommutative series.
//! - [`modforms`]: q-expansions, eta multipliers, level-one bases.
//! - [`collection`]: finitely supported cusp-form collections.
//! - [`iterint`]: nested quadrature and the graded ODE along vertical rays.
//! - [`cocycle`]: the slash action, Ψ(h) and identity checks.
//! - [`mlv`]: period polynomials and multiple L-values.
//! - [`reconstruct`]: peeling a collection back out of a cocycle.

pub mod algebra;
pub mod cocycle;
pub mod collection;
mod error;
pub mod iterint;
pub mod mlv;
pub mod modforms;
pub mod reconstruct;
pub mod report;

pub use error::{Error, Result};

pub use algebra::{
    Alphabet, GroupElement, HalfInteger, Letter, Monomial, MultiplierSpec, NcPoly,
};
pub use collection::CuspCollection;
pub use modforms::{CuspForm, QSeries};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
