//! Exact analysis of circuit-specified Markov chains.
//!
//! The crate is `no_std` (it needs `alloc`). It covers:
//!
//! * [`circuit`]: gate-list circuits, both chain rules `C(x, r)` and samplers `C(r)`;
//! * [`chain`]: state spaces, exact transition matrices, evolution and stationarity;
//! * [`mixing`]: total variation distance, `d(t)`, mixing times and conductance;
//! * [`estimator`]: the simulation-based estimate of `d(t)`;
//! * [`sd`], [`lower_bound`], [`coam`]: statistical-distance identities and the
//!   interactive protocols built on them;
//! * [`reductions`]: the promise problems, their gadgets and brute-force deciders.
//!
//! Probabilities are computed either exactly ([`Rational`]) or in `f64`; both
//! implement [`Scalar`], so every matrix routine is written once.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod chain;
pub mod circuit;
pub mod coam;
mod error;
pub mod dyadic;
pub mod estimator;
pub mod hash;
pub mod lower_bound;
pub mod matrix;
pub mod mixing;
pub mod reductions;
mod scalar;
pub mod sd;

pub use error::{Error, Result};
pub use scalar::{rational, Rational, Scalar};
