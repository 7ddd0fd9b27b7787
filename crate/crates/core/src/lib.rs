//! Stochastic-numerics laboratory around SDEs whose transition semigroups
//! lose regularity: counterexample models, a coupled Euler-Maruyama
//! engine, quadrature and Monte Carlo oracles, and verifiers for the
//! analytic bounds that pin down how slowly the Euler scheme can converge.
//!
//! The flagship experiment measures `|| E[X(T)] - E[Y^h(T)] ||` for a
//! four-dimensional SDE with smooth globally bounded coefficients whose
//! Euler approximations converge slower than any polynomial rate, and
//! checks the measured curve against the closed-form lower bound
//! `exp(-14 |ln h|^(2/3))` level by level.
//!
//! Everything is deterministic: streams are keyed by `(master_seed,
//! stream id)`, Monte Carlo reductions are chunked with a fixed layout,
//! and results are bit-identical for any thread count (the `parallel`
//! feature only changes how chunks are scheduled).

// Negated float comparisons like `!(t >= 0.0)` are NaN guards, not
// style accidents.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod brownian;
pub mod error;
pub mod euler;
pub mod grid;
pub mod mc;
pub mod models;
pub mod quad;
pub mod rng;

pub use error::{Error, Result};
