//! Exact computational-algebra engine for the Hall algebra of the Rudakov
//! quiver over finite fields, the deformed shifted quantum affine algebra
//! `U_v(sl2-hat)_{1,1}` realized by PBW rewriting, and the homomorphism θ
//! connecting the two.
//!
//! Everything is computed in exact arithmetic: scalars live in ℚ[u]/(u⁴−p)
//! (so that quarter powers of q = pᵉ exist) or in the rational function field
//! ℚ(v), finite-field linear algebra is exact over F_q, and Hall structure
//! constants are literal subobject/extension counts.
//!
//! The crate's primary interface is the `examples/` directory — one runnable
//! example per major capability — plus a thin `hallq` binary with the
//! `product`, `verify`, `classify`, `theta-beta` and `interp` subcommands.
//!
//! Module layout (bottom of the tower first):
//!
//! * [`scalar`] — prime powers, ℚ[u]/(u⁴−p) scalars, exact rational functions
//!   in v, quantum numbers.
//! * [`gf`] — finite fields F_q (table-based, q = pᵉ), exact matrices, rref,
//!   kernels, subspace enumeration, irreducible polynomials, companion
//!   matrices, invariant factors.
//! * [`catalog`] — labels for the indecomposable Rudakov representations,
//!   iso-classes (multisets of labels), closed-form Hom dimensions and
//!   automorphism counts.
//! * [`quiver`] — explicit representations, Hom/Ext computation, middle terms
//!   of extensions, full decomposition into indecomposables.
//! * [`hall`] — the Hall algebra: both counting oracles, products, the
//!   localization (fourth roots of (q−1)[M]), the twisted product, σ/τ, and
//!   the standard elements R_n, A_n, B_n.
//! * [`spherical`] — the spherical generators Θ_β, the ψ/φ/h series, the
//!   Heisenberg generators attached to a regular φ, the identity catalog and
//!   expression in the PBW-style spherical basis.
//! * [`qa`] — the quantum algebra side: PBW monomials, normal-form rewriting,
//!   Ψ/Φ ↔ H conversion, θ-evaluation, the finite presentation and the
//!   integral form.
//! * [`interp`] — universal-coefficient interpolation of structure constants
//!   as Laurent polynomials in v.

pub mod scalar;
pub mod gf;
pub mod catalog;
pub mod quiver;
pub mod hall;
pub mod spherical;
pub mod qa;
pub mod interp;

pub use scalar::{PrimePower, QScalar, RatFun};
