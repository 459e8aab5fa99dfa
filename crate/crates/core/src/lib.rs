//! Numerical toolkit for the Mahler measure of the nonreciprocal family
//! `Q_a = y^2 + (x^2 - a*x)y + x` and the elliptic curves attached to it.
//!
//! The family's zero loci are elliptic curves; for `a` outside the real
//! window `(-1, 3)` the measure `n(a) = m(Q_a)` has a classical
//! hypergeometric form, and inside the window the modified measure
//! `ntilde(a) = n(a) - 3J(a)` takes over. This crate evaluates both sides
//! of every identity involved from first principles:
//!
//! - [`quad`]: adaptive Gauss–Kronrod quadrature with breakpoints, plus
//!   complex polyline integration with branch tracking done by the caller.
//! - [`specfun`]: Gamma, generalized hypergeometric series, complete
//!   elliptic integrals, dilogarithms, E1, and `L'(chi_-3, -1)`.
//! - [`mahler`]: the branch functions `y±`, toric points, the quadrature
//!   measures `n`, `I`, `J`, `ntilde`, closed forms, and the window's
//!   path-integral and derivative identities; 2D Mahler measures for the
//!   auxiliary families.
//! - [`elliptic`]: curves over Q from a small built-in table, point
//!   counting, Hecke coefficients, functional-equation sign, `L'(E, 0)`,
//!   and AGM period lattices.
//! - [`modular`]: Dedekind eta, the eta quotient `u(tau)`, Siegel units,
//!   Eisenstein q-expansions, the level-19 modular-unit parametrization,
//!   and elliptic dilogarithm sums.
//! - [`recognize`]: continued-fraction rational reconstruction and a
//!   double-precision PSLQ.

pub mod elliptic;
pub mod error;
pub mod mahler;
pub mod modular;
pub mod quad;
pub mod recognize;
pub mod specfun;

pub use error::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
