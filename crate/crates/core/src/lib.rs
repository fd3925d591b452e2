//! Exact p-adic arithmetic and backward dynamics of the Hénon-like map
//! `f(x, y) = (xy + c, x)` on `Q_p^2`.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is pure
//! computation over immutable values:
//!
//! * [`rational`] / [`truncated`]: rationals viewed inside `Q_p` with exact
//!   valuations, and finite-precision p-adic expansions (Hensel square roots,
//!   certified orbit arithmetic).
//! * [`dynamics`]: the map, its inverse, orbit traces, fixed points and the
//!   3-cycle.
//! * [`fib`] and [`regions`]: Fibonacci utilities and the classifier of norm
//!   profiles into the named regions of the three regimes `|c| < 1`,
//!   `|c| = 1`, `|c| > 1`, with the preimage transition table.
//! * [`measure`]: exact Haar measures of balls, spheres and profile windows.

#![no_std]

extern crate alloc;

pub mod dynamics;
pub mod error;
pub mod fib;
pub mod measure;
pub mod norm;
pub mod prime;
pub mod rational;
pub mod regions;
pub mod sample;
pub mod truncated;

#[cfg(feature = "serde")]
mod serde_impls;

pub use dynamics::{MapParams, Point, Regime};
pub use error::{Error, Result};
pub use norm::{NormExp, NormProfile};
pub use prime::OddPrime;
pub use rational::PadicRational;
pub use regions::{RegionLabel, RegionName};
pub use truncated::TruncatedPadic;
