//! Computational certification of Kähler curvature identities, weighted
//! Hodge Laplacian spectra on CP¹, and Maurer–Cartan deformation series.
//!
//! The crate has three independent engines behind one CLI:
//!
//! - [`jet`] and [`kahler`]: exact-shape truncated Taylor arithmetic and
//!   pointwise Kähler geometry built on it (metric from potential, curvature,
//!   ∂̄, weighted adjoints, brackets).
//! - [`identity`]: randomized two-route verification of pointwise tensor
//!   identities under gauge/compatibility constraints, with control runs that
//!   demonstrate each hypothesis is load-bearing.
//! - [`spectral`]: Galerkin discretization of the weighted Laplacian on CP¹
//!   for eigenvalue bounds, holomorphy diagnostics and moment-map pairings.
//! - [`kuranishi`]: exact rational power-series solver for the deformation
//!   recursion on finite-dimensional differential graded Lie algebras.
//!
//! Sign and index conventions are fixed once in `CONVENTIONS.md` at the
//! repository root; tests cite that document rather than restating choices.

pub mod jet;
pub mod rng;

/// CLI entry point; returns the process exit code.
pub fn run() -> i32 {
    0
}
