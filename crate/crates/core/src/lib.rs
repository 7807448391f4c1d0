//! Multiplicative Weights Update in two-route nonatomic linear congestion games.
//!
//! The route-1 share evolves by `x ↦ x / (x + (1 − x) e^{a(x − b)})`, with the rate
//! either fixed or driven by the running pseudo-regret through a rule `g`.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod chaos;
pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod interval;
pub mod precise;

pub use error::{Error, Result};
pub use interval::Interval;
