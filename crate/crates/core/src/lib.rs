//! Curvature functionals of hypersurfaces in geodesic balls of space forms,
//! and numerical checks of the inequalities and integral identities that
//! hold for them.
//!
//! Space forms of curvature `K ∈ {−1, 0, 1}` are realized conformally on
//! (subsets of) Euclidean space; see [`spaceform`]. Hypersurfaces are
//! parametric ([`geometry`]), their pointwise curvature algebra lives in
//! [`symalg`], and the integral checks are in [`functionals`] and
//! [`reilly`].

#![cfg_attr(not(any(feature = "std", test)), no_std)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod functionals;
pub mod geometry;
pub mod math;
pub mod quadrature;
pub mod reilly;
pub mod spaceform;
pub mod symalg;

pub use error::{Error, Result};
