//! Grid-area bounds for straight-line orthogonal drawings of complete
//! ternary trees that satisfy the subtree separation property.
//!
//! The crate is organized around a small algebra of *staircase sets*
//! (upper-closed subsets of the positive quadrant, represented by their
//! antichains of minimal points) and an *advance* operator that maps the set
//! of achievable grid sizes for `l` tree levels to the set for `l + 1`
//! levels. Everything else builds on that:
//!
//! * [`staircase`] — the exact-rational / floating-point set algebra:
//!   closure, containment order, multiplicative shifts, the advance operator
//!   and its additive-constant-free variant, and minimal shift factors.
//! * [`fronts`] — integer-exact Pareto fronts of achievable `(width, height)`
//!   pairs per level, with back-pointers for witness reconstruction.
//! * [`drawing`] — concrete symmetric drawings built from recursive
//!   construction trees, a full geometric validator, and ASCII/SVG/JSON
//!   renderers.
//! * [`oracle`] — exhaustive search over tiny grids, used to confirm the
//!   small fronts and the validator independently of the constructions.
//! * [`upper`] — the exact induction certificate giving the `O(n^1.051)`
//!   area bound, plus exponent arithmetic.
//! * [`lower`] — the softmax calculus and constant system behind the
//!   `Omega(n^1.031)` lower bound.
//! * [`fixedpoint`] — the fixed-point iteration that tightens the upper
//!   bound to `O(n^1.032)`, with exact rational certificate verification.
//! * [`rational`] — directed dyadic rounding and bounded-denominator
//!   rational approximation used when freezing floating-point boundaries
//!   into exact certificates.

pub mod drawing;
pub mod fixedpoint;
pub mod fronts;
pub mod lower;
pub mod oracle;
pub mod rational;
pub mod staircase;
pub mod upper;

pub use num::rational::BigRational;
pub use num::BigInt;
