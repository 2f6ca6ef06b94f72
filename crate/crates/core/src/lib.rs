//! Exact computational algebra for w-knotted objects.
//!
//! The crate is organized around a handful of interlocking calculi:
//!
//! * [`linalg`] — sparse exact/modular linear algebra over the rationals,
//!   used by every quotient-dimension and membership computation;
//! * [`knots`] — Gauss diagrams for long v/w-knots, Reidemeister-style
//!   rewriting, braid words and the braid action on the free group;
//! * [`arrows`] — arrow diagrams and w-Jacobi diagrams on line, circle and
//!   strand skeletons, their relations (6T, TC, 4T, RI, FI, STU), graded
//!   dimensions, wheels and Lie-algebra weight systems;
//! * [`alexander`] — the determinant formula for the Alexander polynomial
//!   of a long w-knot, with exact Laurent and power-series forms;
//! * [`atspaces`] — truncated free Lie algebras on a Lyndon basis, cyclic
//!   words, tangential derivations, BCH, div and the j cocycle;
//! * [`expansions`] — the universal invariant Z for knots and braids with
//!   its compatibility operations and the wheels normal form;
//! * [`kv`] — a degree-truncated solver and verifier for the translated
//!   Kashiwara-Vergne equations.

pub mod alexander;
pub mod arrows;
pub mod atspaces;
pub mod expansions;
pub mod knots;
pub mod kv;
pub mod linalg;

pub use linalg::Rat;
