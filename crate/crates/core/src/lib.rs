//! Weight-class calculus and compactness diagnostics on weighted Lebesgue
//! spaces.
//!
//! The crate has four layers:
//!
//! * [`exponents`] / [`power_weights`] — exact rational calculus for
//!   multilinear Muckenhoupt exponent vectors, the reduction of the
//!   vector-indexed classes to classical `A_q` conditions, and analytic
//!   membership decisions for power weights `|x|^a`;
//! * [`grid`] / [`numerics`] — grid-based estimation of weight
//!   characteristics by supremum search over dyadic cube families, and
//!   numerical verification of the sharp reverse Hölder inequality;
//! * [`interpolation`] — constructive solvers producing interpolation
//!   parameters `(θ, s⃗, u⃗)` with exactly verified identities, plus the
//!   log-convexity check for diagonal multilinear operators;
//! * [`operators`] / [`compactness`] — a discrete singular-operator lab
//!   (maximal function, fractional integrals, truncated singular
//!   integrals, commutators) and Fréchet-Kolmogorov compactness scans over
//!   input families, including the classical counterexamples.
//!
//! [`scenario`] exposes everything through JSON scenario files for the
//! command-line runner.

pub mod compactness;
pub mod error;
pub mod exponents;
pub mod grid;
pub mod interpolation;
pub mod numerics;
pub mod operators;
pub mod power_weights;
pub mod scenario;

pub use error::{Error, Result};
