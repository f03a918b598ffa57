//! Exact one-dimensional fixed-point machinery over the rationals.
//!
//! * [`scalar`]: canonical arbitrary-precision rationals.
//! * [`expr`]: a tiny language for piecewise-polynomial maps.
//! * [`sperner`]: grids, 0/1 labelings and transition-edge search.
//! * [`solver`]: certified fixed-point brackets with exact residual evidence.
//! * [`plmap`]: the labeling-induced vertex map and its linear interpolant.
//! * [`counterexample`]: a fixed-point-free continuous self-map of `[1, 2] ∩ Q`.
//! * [`cli`]: the `sperner1d` command-line front end.

#![allow(clippy::result_large_err, clippy::should_implement_trait)]

pub mod cli;
pub mod counterexample;
pub mod expr;
pub mod plmap;
pub mod scalar;
pub mod solver;
pub mod sperner;

pub use expr::{EvalError, Expr, RationalMap};
pub use scalar::Rational;
